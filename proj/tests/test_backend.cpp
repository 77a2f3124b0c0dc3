#include <doctest.h>

#include <thread>

#include "summit/backend.hpp"
#include "summit/errors.hpp"
#include "support.hpp"

using namespace summit;
using namespace std::chrono_literals;
using testsupport::FakeTransport;
using testsupport::step;

namespace {

CompletionRequest request(std::string user, std::string tag = "t") {
    CompletionRequest r;
    r.model_id = "m";
    r.messages = {{MessageRole::System, "sys"}, {MessageRole::User, std::move(user)}};
    r.request_tag = std::move(tag);
    return r;
}

// Records the virtual time of each dispatch that reaches it.
class TimedBackend final : public CompletionBackend {
public:
    explicit TimedBackend(std::shared_ptr<Clock> clock) : clock_(std::move(clock)) {}
    CompletionResponse complete(const CompletionRequest&) override {
        std::lock_guard lock(mu_);
        times.push_back(clock_->now());
        return {"ok", {1, 1}, ServedFrom::Live};
    }
    std::vector<Clock::time_point> times;

private:
    std::mutex mu_;
    std::shared_ptr<Clock> clock_;
};

void check_window(const std::vector<Clock::time_point>& raw, std::size_t rpm) {
    auto t = raw;
    std::sort(t.begin(), t.end());
    for (std::size_t k = 0; k + rpm < t.size(); ++k) {
        CHECK(t[k + rpm] - t[k] >= 60s);
    }
}

}  // namespace

TEST_CASE("cache_key") {
    auto a = request("hello", "tag-a");
    auto b = request("hello", "tag-b");
    CHECK(cache_key(a) == cache_key(b));
    CHECK(cache_key(a).size() == 64);
    CHECK(cache_key(a) != cache_key(request("hellp")));
    auto t = a;
    t.temperature = 0.7;
    CHECK(cache_key(a) != cache_key(t));
    auto m = a;
    m.max_output_tokens = 100;
    CHECK(cache_key(a) != cache_key(m));

    CompletionRequest x = request("u1");
    x.messages.push_back({MessageRole::Assistant, "r"});
    x.messages.push_back({MessageRole::User, "u2"});
    CompletionRequest y = x;
    CHECK(cache_key(x) == cache_key(y));
    std::swap(y.messages[1], y.messages[3]);
    CHECK(cache_key(x) != cache_key(y));
    // Content boundaries are unambiguous.
    CompletionRequest p = request("ab"), q = request("a");
    p.messages[0].content = "sys";
    q.messages[0].content = "sysb";
    CHECK(cache_key(p) != cache_key(q));
}

TEST_CASE("request validation") {
    CompletionRequest r;
    r.model_id = "m";
    CHECK_THROWS_AS(r.validate(), ConfigError);
    r.messages = {{MessageRole::User, "u"}};
    CHECK_THROWS_AS(r.validate(), ConfigError);
    CHECK_NOTHROW(request("u").validate());
    CHECK(request("last").last_user_message() == "last");
}

TEST_CASE("scripted backend") {
    ScriptedBackend one({step("evaluate", "Do nothing. <STOP>")});
    auto r = one.complete(request("please evaluate this"));
    CHECK(r.text == "Do nothing. <STOP>");
    CHECK(r.served_from == ServedFrom::Script);
    CHECK_THROWS_AS(one.complete(request("please evaluate this")), ScriptExhausted);
    CHECK_THROWS_AS(ScriptedBackend({}).complete(request("x")), ScriptExhausted);

    ScriptedBackend ordered({step("", "first"), step("", "second")});
    CHECK(ordered.complete(request("a")).text == "first");
    CHECK(ordered.complete(request("b")).text == "second");
    CHECK(ordered.calls() == 2);

    ScriptedBackend mixed({step("refine", "R"), step("evaluate", "E", true)});
    CHECK(mixed.complete(request("evaluate")).text == "E");
    CHECK(mixed.complete(request("evaluate")).text == "E");
    CHECK(mixed.complete(request("refine")).text == "R");

    ScriptStep re;
    re.match = ScriptStep::Match::Regex;
    re.pattern = "^Doc [0-9]+$";
    re.response = "regex";
    ScriptedBackend rx({re});
    CHECK_THROWS_AS(rx.complete(request("Doc x")), ScriptExhausted);
    CHECK(rx.complete(request("Doc 42")).text == "regex");

    ScriptStep boom = step("", "");
    boom.fail = "connection reset";
    CHECK_THROWS_AS(ScriptedBackend({boom}).complete(request("x")), TransportError);
}

TEST_CASE("scripted backend is deterministic") {
    std::vector<ScriptStep> steps{step("a", "1"), step("b", "2", true), step("", "3")};
    std::vector<std::string> inputs{"b", "a", "c", "b"};
    auto run = [&] {
        ScriptedBackend s(steps);
        std::vector<std::string> out;
        for (const auto& in : inputs) out.push_back(s.complete(request(in)).text);
        return out;
    };
    CHECK(run() == run());
    CHECK(run() == std::vector<std::string>{"2", "1", "3", "2"});
}

TEST_CASE("script book") {
    auto book = ScriptBook::parse(R"({"format":"summit-script","version":1,
        "steps":[{"response":"default"}],
        "documents":{"d1":[{"match":"x","response":"doc one"}],
                     "d2":[{"regex":"^y","response":"doc two","repeat":true}],
                     "d3":[{"fail":"down"}]}})");
    CHECK(book.for_document("other")->complete(request("q")).text == "default");
    CHECK(book.for_document("d1")->complete(request("x")).text == "doc one");
    auto d2 = book.for_document("d2");
    CHECK(d2->complete(request("yes")).text == "doc two");
    CHECK(d2->complete(request("yes")).text == "doc two");
    CHECK_THROWS_AS(book.for_document("d3")->complete(request("q")), TransportError);
    CHECK_THROWS_AS(ScriptBook::parse(R"({"format":"other"})"), ConfigError);
    CHECK_THROWS_AS(ScriptBook::load("/nonexistent/script.json"), FileNotFound);
}

TEST_CASE("cache serves identical requests from memory") {
    auto cache = std::make_shared<ResponseCache>();
    auto transport = std::make_shared<FakeTransport>(
        [](const HttpRequest&, int call) { return HttpResponse{200, testsupport::chat_reply("reply " + std::to_string(call)), ""}; });
    auto live = std::make_shared<LiveBackend>(LiveConfig{"http://x/v1", "k"}, transport,
                                              std::make_shared<VirtualClock>());
    CachedBackend cached(cache, live);
    auto first = cached.complete(request("same", "a"));
    auto second = cached.complete(request("same", "b"));
    CHECK(first.served_from == ServedFrom::Live);
    CHECK(second.served_from == ServedFrom::Cache);
    CHECK(second.text == first.text);
    CHECK(second.usage.prompt_tokens == first.usage.prompt_tokens);
    CHECK(transport->requests.size() == 1);
    CHECK(cached.complete(request("different")).served_from == ServedFrom::Live);
}

TEST_CASE("cache persistence and replay") {
    testsupport::TempDir dir;
    auto path = dir / "cache.jsonl";
    {
        auto cache = std::make_shared<ResponseCache>(path);
        CachedBackend b(cache, std::make_shared<ScriptedBackend>(
                                   std::vector<ScriptStep>{step("", "A"), step("", "B")}));
        b.complete(request("one"));
        b.complete(request("two"));
        CHECK(cache->size() == 2);
    }
    auto text = testsupport::read_text(path);
    CHECK(text.rfind("{\"format\":\"summit-cache\",\"version\":1}\n", 0) == 0);
    // A torn trailing record is skipped on reload.
    testsupport::write_text(path, text + "{\"key\":\"abc\",\"te");
    auto reloaded = std::make_shared<ResponseCache>(path);
    CHECK(reloaded->size() == 2);
    CachedBackend replay(reloaded, nullptr);
    auto r = replay.complete(request("two"));
    CHECK(r.text == "B");
    CHECK(r.served_from == ServedFrom::Cache);
    CHECK_THROWS_AS(replay.complete(request("three")), CacheMiss);

    testsupport::write_text(dir / "bad.jsonl", "{\"format\":\"nope\"}\n");
    CHECK_THROWS_AS(ResponseCache(dir / "bad.jsonl"), ConfigError);
}

TEST_CASE("cache first write wins under concurrency") {
    auto cache = std::make_shared<ResponseCache>();
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) {
                cache->store({"k" + std::to_string(i), "m", "", "v" + std::to_string(t), {}});
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(cache->size() == 50);
    std::string v = cache->lookup("k0")->text;
    CHECK(cache->lookup("k0")->text == v);
}

TEST_CASE("live backend wire shape") {
    auto transport = std::make_shared<FakeTransport>(
        [](const HttpRequest&, int) { return HttpResponse{200, testsupport::chat_reply("hi", 12, 3), ""}; });
    LiveBackend live(LiveConfig{"http://host:8080/v1/", "secret"}, transport,
                     std::make_shared<VirtualClock>());
    auto req = request("hello");
    req.temperature = 0.25;
    req.max_output_tokens = 77;
    auto r = live.complete(req);
    CHECK(r.text == "hi");
    CHECK(r.usage.prompt_tokens == 12);
    CHECK(r.usage.completion_tokens == 3);
    CHECK(r.served_from == ServedFrom::Live);
    const auto& sent = transport->requests.at(0);
    CHECK(sent.url == "http://host:8080/v1/chat/completions");
    bool auth = false;
    for (const auto& [k, v] : sent.headers) auth |= k == "Authorization" && v == "Bearer secret";
    CHECK(auth);
    auto body = nlohmann::json::parse(sent.body);
    CHECK(body["model"] == "m");
    CHECK(body["temperature"] == 0.25);
    CHECK(body["max_tokens"] == 77);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][1]["content"] == "hello");
    CHECK_THROWS_AS(LiveBackend::parse_response_body("{\"choices\":[]}"), BackendError);
}

TEST_CASE("live backend retries transient failures") {
    auto clock = std::make_shared<VirtualClock>();
    auto flaky = std::make_shared<FakeTransport>([](const HttpRequest&, int call) {
        if (call == 1) return HttpResponse{429, "slow down", ""};
        if (call == 2) return HttpResponse{503, "", ""};
        return HttpResponse{200, testsupport::chat_reply("finally"), ""};
    });
    LiveBackend live(LiveConfig{"http://x", "k"}, flaky, clock);
    auto start = clock->now();
    CHECK(live.complete(request("q")).text == "finally");
    CHECK(live.attempts() == 3);
    CHECK(clock->now() - start == 3000ms);  // 1 s + 2 s backoff

    auto down = std::make_shared<FakeTransport>(
        [](const HttpRequest&, int) { return HttpResponse{0, "", "refused"}; });
    LiveBackend dead(LiveConfig{"http://x", "k"}, down, clock);
    CHECK_THROWS_AS(dead.complete(request("q")), TransportError);
    CHECK(dead.attempts() == 4);

    auto denied = std::make_shared<FakeTransport>(
        [](const HttpRequest&, int) { return HttpResponse{401, "", ""}; });
    LiveBackend auth(LiveConfig{"http://x", "k"}, denied, clock);
    CHECK_THROWS_AS(auth.complete(request("q")), AuthError);
    CHECK(auth.attempts() == 1);

    auto bad_request = std::make_shared<FakeTransport>(
        [](const HttpRequest&, int) { return HttpResponse{400, "bad", ""}; });
    LiveBackend br(LiveConfig{"http://x", "k"}, bad_request, clock);
    CHECK_THROWS_AS(br.complete(request("q")), TransportError);
    CHECK(br.attempts() == 1);
}

TEST_CASE("retry policy delays") {
    RetryPolicy p;
    CHECK(p.delay_after(1) == 1000ms);
    CHECK(p.delay_after(2) == 2000ms);
    CHECK(p.delay_after(3) == 4000ms);
    CHECK(p.delay_after(10) == 30000ms);
}

TEST_CASE("throttle window bound with a virtual clock") {
    auto clock = std::make_shared<VirtualClock>();
    auto timed = std::make_shared<TimedBackend>(clock);
    auto throttled = throttle(timed, 2, clock);
    for (int i = 0; i < 5; ++i) throttled->complete(request("q"));
    REQUIRE(timed->times.size() == 5);
    check_window(timed->times, 2);
    CHECK(timed->times[0] == timed->times[1]);

    auto fast_clock = std::make_shared<VirtualClock>();
    auto fast = std::make_shared<TimedBackend>(fast_clock);
    auto open = throttle(fast, 1000, fast_clock);
    for (int i = 0; i < 5; ++i) open->complete(request("q"));
    for (auto t : fast->times) CHECK(t == Clock::time_point{});
}

TEST_CASE("throttle bound holds with concurrent submitters") {
    auto clock = std::make_shared<VirtualClock>();
    RateLimiter limiter(3, clock);
    std::vector<std::thread> threads;
    for (int t = 0; t < 6; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 5; ++i) limiter.acquire();
        });
    }
    for (auto& th : threads) th.join();
    auto log = limiter.dispatch_log();
    CHECK(log.size() == 30);
    check_window(log, 3);
}

TEST_CASE("cache hits bypass the throttle") {
    auto clock = std::make_shared<VirtualClock>();
    auto timed = std::make_shared<TimedBackend>(clock);
    auto cache = std::make_shared<ResponseCache>();
    for (int i = 0; i < 5; ++i) {
        auto r = request("q" + std::to_string(i));
        cache->store({cache_key(r), "m", "", "cached", {}});
    }
    CachedBackend b(cache, throttle(timed, 1, clock));
    for (int i = 0; i < 5; ++i) {
        CHECK(b.complete(request("q" + std::to_string(i))).served_from == ServedFrom::Cache);
    }
    CHECK(timed->times.empty());
    CHECK(clock->now() == Clock::time_point{});
    CHECK_THROWS_AS(throttle(timed, 0, clock), ConfigError);
}
