#pragma once

// Socket front end for handle_request: bounded worker pool, permissive CORS,
// optional static mount for the authoring UI bundle.

#include "expressive/service.hpp"

#include <httplib.h>

#include <memory>
#include <string>
#include <utility>

namespace expressive::service {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  ///< 0 picks a free port
  std::size_t threads = 4;
  std::string ui_dir;  ///< served at / when non-empty
  std::size_t max_body_bytes = 8u << 20;
};

class Server {
public:
  Server(ServiceContext ctx, ServerOptions options)
      : ctx_(std::make_shared<const ServiceContext>(std::move(ctx))), options_(std::move(options)) {
    const std::size_t n = options_.threads == 0 ? 1 : options_.threads;
    svr_.new_task_queue = [n] { return new httplib::ThreadPool(n); };
    svr_.set_payload_max_length(options_.max_body_bytes);
    svr_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
    if (!options_.ui_dir.empty() && !svr_.set_mount_point("/", options_.ui_dir))
      throw InputError("ui directory '" + options_.ui_dir + "' does not exist");

    const auto forward = [ctx = ctx_](const httplib::Request& req, httplib::Response& res) {
      const auto r = handle_request(*ctx, req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.text(), "application/json");
    };
    svr_.Get(".*", forward);
    svr_.Post(".*", forward);
    svr_.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }

  /// Binds the listening socket; returns the bound port or throws.
  int bind() {
    if (options_.port == 0) {
      port_ = svr_.bind_to_any_port(options_.host);
    } else {
      port_ = svr_.bind_to_port(options_.host, options_.port) ? options_.port : -1;
    }
    if (port_ <= 0)
      throw ProcessingError("serve", "cannot bind " + options_.host + ":" + std::to_string(options_.port));
    return port_;
  }

  /// Blocks until stop() is called from another thread.
  void run() {
    if (port_ <= 0) bind();
    svr_.listen_after_bind();
  }

  void stop() { svr_.stop(); }
  void wait_until_ready() const { svr_.wait_until_ready(); }
  int port() const { return port_; }

private:
  std::shared_ptr<const ServiceContext> ctx_;
  ServerOptions options_;
  httplib::Server svr_;
  int port_ = -1;
};

}  // namespace expressive::service
