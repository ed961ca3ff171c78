#include "hometwin/core/error.hpp"
#include "hometwin/service/service.hpp"

#include <httplib.h>

#include <thread>

namespace hometwin::service {

struct HttpFrontend::Impl {
    explicit Impl(TwinService& s) : service(s) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            Request r;
            r.method = req.method;
            r.path = req.path;
            for (const auto& [k, v] : req.params) {
                r.query.emplace(k, v);
            }
            r.body = req.body;
            r.content_type = req.get_header_value("Content-Type");
            const Response out = service.handle(r);
            res.status = out.status;
            for (const auto& [k, v] : out.headers) {
                res.set_header(k, v);
            }
            res.set_content(out.body, out.content_type);
        };
        // SO_REUSEPORT would let a second instance bind the same port silently
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
        });
        server.Get(".*", handler);
        server.Post(".*", handler);
        server.Put(".*", handler);
        server.Delete(".*", handler);
    }

    int bind(const std::string& host, int port) {
        const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
        if (bound <= 0) {
            throw Error(ErrorCode::unavailable, "cannot listen on " + host + ":" + std::to_string(port));
        }
        return bound;
    }

    TwinService& service;
    httplib::Server server;
    std::thread thread;
};

HttpFrontend::HttpFrontend(TwinService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::start(const std::string& host, int port) {
    const int bound = impl_->bind(host, port);
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpFrontend::run(const std::string& host, int port) {
    impl_->bind(host, port);
    impl_->server.listen_after_bind();
}

void HttpFrontend::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

} // namespace hometwin::service
