#include "lobviz/http.hpp"

#include "lobviz/error.hpp"

#include <httplib.h>

namespace lobviz {

struct HttpServer::Impl {
    const Service& service;
    httplib::Server server;

    explicit Impl(const Service& s) : service(s) {
        server.Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
            const Params params(req.params.begin(), req.params.end());
            const Response r = service.handle(req.path, params);
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        });
        const auto reject = [](const httplib::Request&, httplib::Response& res) {
            const Response r = error_response(405, "the API is read-only; use GET");
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        server.Post(R"(/.*)", reject);
        server.Put(R"(/.*)", reject);
        server.Delete(R"(/.*)", reject);
        server.Patch(R"(/.*)", reject);
    }
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) throw Error("cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace lobviz
