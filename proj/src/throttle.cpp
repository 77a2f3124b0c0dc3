#include <thread>

#include "summit/backend.hpp"
#include "summit/errors.hpp"

namespace summit {

void SystemClock::sleep_until(time_point t) { std::this_thread::sleep_until(t); }

Clock::time_point VirtualClock::now() {
    std::lock_guard lock(mu_);
    return now_;
}

void VirtualClock::sleep_until(time_point t) {
    std::lock_guard lock(mu_);
    if (t > now_) now_ = t;
}

void VirtualClock::advance(std::chrono::milliseconds d) {
    std::lock_guard lock(mu_);
    now_ += d;
}

RateLimiter::RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock)
    : rpm_(requests_per_minute), clock_(std::move(clock)) {
    if (rpm_ < 1) throw ConfigError("requests_per_minute must be >= 1");
    if (!clock_) clock_ = std::make_shared<SystemClock>();
}

Clock::time_point RateLimiter::acquire() {
    constexpr auto kWindow = std::chrono::seconds(60);
    Clock::time_point slot;
    {
        std::lock_guard lock(mu_);
        slot = clock_->now();
        // Reservations are handed out in non-decreasing order, so the window
        // holds the last rpm slots and the oldest bounds the next one.
        if (!window_.empty() && window_.back() > slot) slot = window_.back();
        if (static_cast<int>(window_.size()) == rpm_) {
            slot = std::max(slot, window_.front() + kWindow);
            window_.pop_front();
        }
        window_.push_back(slot);
        log_.push_back(slot);
    }
    clock_->sleep_until(slot);
    return slot;
}

std::vector<Clock::time_point> RateLimiter::dispatch_log() const {
    std::lock_guard lock(mu_);
    return log_;
}

ThrottledBackend::ThrottledBackend(std::shared_ptr<CompletionBackend> inner,
                                   std::shared_ptr<RateLimiter> limiter)
    : inner_(std::move(inner)), limiter_(std::move(limiter)) {
    if (!inner_ || !limiter_) throw ConfigError("ThrottledBackend requires a backend and limiter");
}

CompletionResponse ThrottledBackend::complete(const CompletionRequest& request) {
    limiter_->acquire();
    return inner_->complete(request);
}

std::shared_ptr<ThrottledBackend> throttle(std::shared_ptr<CompletionBackend> inner,
                                           int requests_per_minute, std::shared_ptr<Clock> clock) {
    auto limiter = std::make_shared<RateLimiter>(requests_per_minute, std::move(clock));
    return std::make_shared<ThrottledBackend>(std::move(inner), std::move(limiter));
}

}  // namespace summit
