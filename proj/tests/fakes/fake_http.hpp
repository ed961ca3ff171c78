#pragma once

#include "hometwin/ingestion/http.hpp"

#include <functional>
#include <mutex>
#include <vector>

namespace fakes {

/// Records every request and answers through a handler.
class FakeTransport : public hometwin::ingestion::HttpTransport {
public:
    using Handler = std::function<hometwin::ingestion::HttpResponse(const hometwin::ingestion::HttpRequest&)>;

    explicit FakeTransport(Handler handler) : handler_(std::move(handler)) {}

    hometwin::ingestion::HttpResponse send(const hometwin::ingestion::HttpRequest& request) override {
        std::lock_guard lock(mutex_);
        log_.push_back(request);
        return handler_(request);
    }

    std::vector<hometwin::ingestion::HttpRequest> log() const {
        std::lock_guard lock(mutex_);
        return log_;
    }
    std::size_t calls() const {
        std::lock_guard lock(mutex_);
        return log_.size();
    }

private:
    Handler handler_;
    mutable std::mutex mutex_;
    std::vector<hometwin::ingestion::HttpRequest> log_;
};

} // namespace fakes
