#include "meatcut/harness/service.hpp"

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/transform_width.hpp>

#include "httplib.h"
#include "json.hpp"

#include "meatcut/calib.hpp"
#include "meatcut/error.hpp"
#include "meatcut/harness/metrics.hpp"
#include "meatcut/harness/runlog.hpp"

namespace meatcut::harness {

using nlohmann::json;

std::string base64_encode(const std::string& bytes) {
  namespace it = boost::archive::iterators;
  using Encoder = it::base64_from_binary<it::transform_width<std::string::const_iterator, 6, 8>>;
  std::string out(Encoder(bytes.begin()), Encoder(bytes.end()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

namespace {

// Failure surfaced to the client with a fixed status.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

int status_for(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::DegenerateCut:
    case Errc::InfeasiblePlan:
    case Errc::AmbiguousMarkers:
    case Errc::SafetyViolation:
      return 422;
    case Errc::Parse:
      return 400;
    default:
      return 500;
  }
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, const HttpError& e) {
  reply(res, e.status, {{"error", e.code}, {"message", e.message}});
}

// Serialized single-owner executor.
class Actor {
 public:
  Actor() : worker_([this] { loop(); }) {}
  ~Actor() {
    {
      const std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    cv_.notify_all();
    worker_.join();
  }

  template <class F>
  auto call(F&& f) -> decltype(f()) {
    using R = decltype(f());
    auto task = std::make_shared<std::packaged_task<R()>>(std::forward<F>(f));
    std::future<R> result = task->get_future();
    {
      const std::lock_guard lock(mutex_);
      queue_.emplace_back([task] { (*task)(); });
    }
    cv_.notify_one();
    return result.get();
  }

 private:
  void loop() {
    for (;;) {
      std::function<void()> job;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        job = std::move(queue_.front());
        queue_.pop_front();
      }
      job();
    }
  }

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> queue_;
  bool stopping_ = false;
  std::thread worker_;
};

// What readers see; replaced wholesale on every mutation.
struct View {
  std::string scene;                // GET /scene body
  std::optional<std::string> plan;  // GET /plan body
};

}  // namespace

struct Service::Impl {
  Config config;
  RunStore store;
  httplib::Server server;

  // Owned by the actor thread.
  MeatSpec spec;
  InteractiveState state;
  std::vector<MarkerPairPx> cuts;
  std::optional<MarkerPairPx> markers;

  std::mutex view_mutex;
  std::shared_ptr<const View> view;

  Actor actor;  // last member: joins before the state above is destroyed

  Impl(Config c, std::optional<MeatSpec> s)
      : config(std::move(c)), store(config.run_dir), spec(s ? *s : random_chop(config.seed)) {
    config.validate();
    reset_state();
    routes();
  }

  std::shared_ptr<const View> current() {
    const std::lock_guard lock(view_mutex);
    return view;
  }

  void reset_state() {
    state = InteractiveState{build_piece(spec), {}, {}};
    cuts.clear();
    markers.reset();
    publish();
  }

  json scene_payload() const {
    const vision::Scene scene = render_scene(std::span<const Piece>(&state.piece, 1), {}, config, config.seed);
    std::ostringstream ppm;
    vision::write_ppm(ppm, scene);
    json seg = nullptr;
    try {
      seg = vision::to_json(vision::segment_scene(scene, config.segmentation));
    } catch (const Error&) {
      // An emptied board has nothing to segment.
    }
    const auto& p = config.camera.params;
    const auto& b = scene.board;
    return {{"width", scene.width},
            {"height", scene.height},
            {"board", {{"x", b.x}, {"y", b.y}, {"width", b.width}, {"height", b.height}}},
            {"ppm_base64", base64_encode(ppm.str())},
            {"segmentation", std::move(seg)},
            {"calibration",
             {{"theta0", p.theta0}, {"theta1", p.theta1}, {"theta2", p.theta2}, {"theta3", p.theta3}, {"theta4", p.theta4}}},
            {"piece", describe_piece(state.piece, spec)},
            {"cuts", cuts.size()}};
  }

  json plan_payload() const {
    const auto& p = config.camera.params;
    const planner::CutPlan plan = planner::plan_point_to_point(calib::pixel_to_robot(p, markers->a),
                                                               calib::pixel_to_robot(p, markers->b));
    json robot = json::array();
    json pixel = json::array();
    for (Vec2 q : plan.polylines.front()) {
      robot.push_back({q.x, q.y});
      const Vec2 px = calib::robot_to_pixel(p, q);
      pixel.push_back({px.x, px.y});
    }
    return {{"task", planner::to_string(plan.task)},
            {"markers", {{{"x", markers->a.x}, {"y", markers->a.y}}, {{"x", markers->b.x}, {"y", markers->b.y}}}},
            {"robot", std::move(robot)},
            {"pixel", std::move(pixel)}};
  }

  void publish() {
    auto next = std::make_shared<View>();
    next->scene = scene_payload().dump();
    if (markers) next->plan = plan_payload().dump();
    const std::lock_guard lock(view_mutex);
    view = std::move(next);
  }

  MarkerPairPx parse_markers(const std::string& body) const {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      throw HttpError{400, "Parse", e.what()};
    }
    if (!j.is_object() || !j.contains("markers") || !j.at("markers").is_array()) {
      throw HttpError{400, "Parse", "body needs a \"markers\" array"};
    }
    const json& arr = j.at("markers");
    std::vector<Vec2> pts;
    for (const json& m : arr) {
      if (!m.is_object() || !m.contains("x") || !m.contains("y") || !m.at("x").is_number() || !m.at("y").is_number()) {
        throw HttpError{400, "Parse", "each marker needs numeric x and y"};
      }
      pts.push_back({m.at("x").get<double>(), m.at("y").get<double>()});
    }
    if (pts.size() != 2) {
      throw HttpError{422, "InvalidArgument", "point-to-point needs exactly 2 markers, got " + std::to_string(pts.size())};
    }
    if (distance(pts[0], pts[1]) < 1.0) throw HttpError{422, "DegenerateCut", "markers coincide"};
    const auto& b = config.camera.board;
    for (Vec2 p : pts) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < b.x || p.y < b.y || p.x > b.x + b.width ||
          p.y > b.y + b.height) {
        throw HttpError{422, "InvalidArgument", "marker lies outside the cutting board"};
      }
    }
    return {pts[0], pts[1]};
  }

  json execute() {
    if (!markers) throw HttpError{409, "Conflict", "no plan: place two markers first"};
    const std::string before_ppm = [&] {
      std::ostringstream out;
      vision::write_ppm(out, render_scene(std::span<const Piece>(&state.piece, 1), {}, config, config.seed));
      return out.str();
    }();
    DefatOutcome out = point_to_point_cut(state.piece, markers->a, markers->b, spec, config, config.seed + cuts.size());
    cuts.push_back(*markers);
    state.piece = out.cut.kept;
    state.trims.push_back(out.cut.record);
    state.outcomes.push_back(out);

    const vision::Scene before = out.scene;
    const vision::Scene after = render_scene(std::span<const Piece>(&state.piece, 1), {}, config, config.seed);
    const Snapshot snaps[] = {{"before", &before}, {"after", &after}};
    const std::string id = store.persist(
        interactive_runlog(state, spec, config, cuts, config.pipeline.trajectory_decimation), snaps);
    publish();

    json tracking = {{"mean_error", out.execution.tracking.mean_error},
                     {"max_error", out.execution.tracking.max_error},
                     {"held_steps", out.execution.tracking.held_steps}};
    return {{"run_id", id},
            {"trajectory", to_json(decimate(out.execution.tracking.executed, config.pipeline.trajectory_decimation))},
            {"tracking", std::move(tracking)},
            {"trim", out.cut.record},
            {"trim_accuracy", trim_accuracy(std::span<const TrimRecord>(state.trims))},
            {"scene", json::parse(current()->scene)}};
  }

  // Runs `f` on the actor and maps failures to responses.
  template <class F>
  void guarded(httplib::Response& res, F&& f) {
    try {
      std::forward<F>(f)();
    } catch (const HttpError& e) {
      reply_error(res, e);
    } catch (const Error& e) {
      reply_error(res, {status_for(e.code()), std::string(to_string(e.code())), e.what()});
    } catch (const std::exception& e) {
      reply_error(res, {500, "Internal", e.what()});
    }
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, {{"status", "ok"}}); });

    server.Get("/scene", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(current()->scene, "application/json");
    });

    server.Get("/plan", [this](const httplib::Request&, httplib::Response& res) {
      const auto v = current();
      if (!v->plan) return reply_error(res, {409, "Conflict", "no markers placed"});
      res.set_content(*v->plan, "application/json");
    });

    server.Post("/markers", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const MarkerPairPx m = parse_markers(req.body);
        const std::string plan = actor.call([&] {
          markers = m;
          publish();
          return *current()->plan;
        });
        res.set_content(plan, "application/json");
      });
    });

    server.Post("/execute", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { reply(res, 200, actor.call([&] { return execute(); })); });
    });

    server.Post("/reset", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::optional<std::uint64_t> seed;
        if (!req.body.empty()) {
          try {
            const json j = json::parse(req.body);
            if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
          } catch (const json::exception& e) {
            throw HttpError{400, "Parse", e.what()};
          }
        }
        actor.call([&] {
          if (seed) spec = random_chop(*seed);
          reset_state();
        });
        res.set_content(current()->scene, "application/json");
      });
    });

    server.Get(R"(/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!valid_run_id(id)) return reply_error(res, {404, "NotFound", "unknown run '" + id + "'"});
      try {
        reply(res, 200, store.load(id));
      } catch (const Error& e) {
        if (e.code() == Errc::Io) return reply_error(res, {404, "NotFound", e.what()});
        reply_error(res, {500, std::string(to_string(e.code())), e.what()});
      }
    });
  }
};

Service::Service(Config config, std::optional<MeatSpec> spec)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(spec))) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(Errc::Io, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error(Errc::Io, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace meatcut::harness
