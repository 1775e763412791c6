#include "evcs/app/service.hpp"

#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "evcs/app/operations.hpp"
#include "evcs/error.hpp"
#include "evcs/network.hpp"
#include "evcs/scenario.hpp"

namespace evcs::app {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, int status, std::string_view kind,
                 const std::string& message) {
  reply(res, status, {{"error", message}, {"kind", kind}});
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) {
    reply_error(res, 400, to_string(ErrorKind::InvalidInput), "$: body is not valid JSON");
    return std::nullopt;
  }
  return body;
}

std::size_t default_workers() {
  const auto n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  JobStore store;
  httplib::Server server;
  int bound_port = -1;

  explicit Impl(ServiceOptions opts)
      : options(std::move(opts)),
        store(options.workers == 0 ? default_workers() : options.workers, options.state_dir) {
    routes();
  }

  // Validates synchronously so schema errors come back as 400 instead of a
  // failed job.
  template <class Parse, class Run>
  void submit(JobKind kind, const httplib::Request& req, httplib::Response& res, Parse parse,
              Run run) {
    auto body = parse_body(req, res);
    if (!body) return;
    try {
      auto request = std::make_shared<decltype(parse(*body))>(parse(*body));
      const auto id = store.submit(
          kind, [request, run](JobContext& ctx) { return run(*request, ctx.callback()); });
      reply(res, 202, {{"job_id", id}, {"status", "QUEUED"}});
    } catch (const Error& e) {
      reply_error(res, 400, to_string(e.kind()), e.what());
    }
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
    server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });

    server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200,
            {{"status", "ok"}, {"workers", store.worker_count()}, {"seed", options.seed}});
    });

    server.Post("/v1/solve", [this](const httplib::Request& req, httplib::Response& res) {
      submit(JobKind::Solve, req, res, parse_solve_request,
             [](const SolveRequest& r, const ProgressCallback& cb) { return solve_payload(r, cb); });
    });
    server.Post("/v1/calibrate", [this](const httplib::Request& req, httplib::Response& res) {
      submit(JobKind::Calibrate, req, res, parse_calibrate_request,
             [](const CalibrateRequest& r, const ProgressCallback& cb) {
               return calibrate_payload(r, cb);
             });
    });
    server.Post("/v1/scenarios/compare",
                [this](const httplib::Request& req, httplib::Response& res) {
                  submit(JobKind::Compare, req, res, parse_compare_request,
                         [](const CompareRequest& r, const ProgressCallback& cb) {
                           return compare_payload(r, cb);
                         });
                });

    server.Post("/v1/networks/validate", [](const httplib::Request& req, httplib::Response& res) {
      auto body = parse_body(req, res);
      if (!body) return;
      try {
        const auto parsed = parse_solve_request(*body);
        reply(res, 200,
              {{"valid", true},
               {"nodes", parsed.network.node_count()},
               {"stations", parsed.network.station_count()},
               {"total_demand", parsed.network.total_demand()},
               {"total_capacity", parsed.network.total_capacity()},
               {"warnings", parsed.warnings}});
      } catch (const Error& e) {
        reply_error(res, 400, to_string(e.kind()), e.what());
      }
    });

    server.Get("/v1/jobs/:id", [this](const httplib::Request& req, httplib::Response& res) {
      const auto rec = store.get(req.path_params.at("id"));
      if (!rec) return reply_error(res, 404, "not-found", "unknown job");
      reply(res, 200, job_record_to_json(*rec));
    });

    server.Get("/v1/jobs/:id/result", [this](const httplib::Request& req, httplib::Response& res) {
      const auto rec = store.get(req.path_params.at("id"));
      if (!rec) return reply_error(res, 404, "not-found", "unknown job");
      if (rec->status == JobStatus::Done) return reply(res, 200, *rec->result);
      json body{{"status", std::string(to_string(rec->status))}};
      body["error"] = rec->error.empty() ? "job has not finished" : rec->error;
      reply(res, 409, body);
    });

    server.Get("/v1/jobs/:id/rank", [this](const httplib::Request& req, httplib::Response& res) {
      const auto rec = store.get(req.path_params.at("id"));
      if (!rec) return reply_error(res, 404, "not-found", "unknown job");
      if (rec->kind != JobKind::Solve || rec->status != JobStatus::Done) {
        return reply_error(res, 409, "conflict", "ranking needs a finished solve job");
      }
      try {
        const auto criterion = rank_criterion_from_string(
            req.has_param("criterion") ? req.get_param_value("criterion") : "utilization");
        const bool level2 = req.get_param_value("level2_only") == "true";
        const auto ids = ranking_from_payload(*rec->result, criterion, level2);
        reply(res, 200, {{"job_id", rec->job_id}, {"stations", ids.value_or(std::vector<std::string>{})}});
      } catch (const Error& e) {
        reply_error(res, 400, to_string(e.kind()), e.what());
      }
    });

    server.Delete("/v1/jobs/:id", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.path_params.at("id");
      switch (store.cancel(id)) {
        case CancelOutcome::NotFound:
          return reply_error(res, 404, "not-found", "unknown job");
        case CancelOutcome::AlreadyFinished:
          return reply_error(res, 409, "conflict", "job already finished");
        case CancelOutcome::Cancelled:
          break;
      }
      reply(res, 202, job_record_to_json(*store.get(id)));
    });
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { stop(); }

int Service::bind() {
  auto& s = impl_->server;
  impl_->bound_port = impl_->options.port == 0
                          ? s.bind_to_any_port(impl_->options.host)
                          : (s.bind_to_port(impl_->options.host, impl_->options.port)
                                 ? impl_->options.port
                                 : -1);
  return impl_->bound_port;
}

bool Service::serve() { return impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

JobStore& Service::jobs() { return impl_->store; }

}  // namespace evcs::app
