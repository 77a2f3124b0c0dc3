#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "summit/backend.hpp"
#include "summit/http.hpp"
#include "summit/types.hpp"

namespace testsupport {

// Independent reference computations. Nothing here calls into the library's
// metric code.
namespace oracle {

inline std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        bool word = (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') ||
                    u >= 0x80;
        if (word) {
            cur.push_back(u >= 'A' && u <= 'Z' ? static_cast<char>(u - 'A' + 'a') : c);
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct PRF {
    double p = 0, r = 0, f = 0;
};

inline PRF prf(double overlap, double cand, double ref) {
    PRF s;
    s.p = cand > 0 ? overlap / cand : 0.0;
    s.r = ref > 0 ? overlap / ref : 0.0;
    s.f = s.p + s.r > 0 ? 2 * s.p * s.r / (s.p + s.r) : 0.0;
    return s;
}

// Enumerates every n-gram of each side and greedily pairs equal ones.
inline PRF rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                   int n) {
    auto grams = [n](const std::vector<std::string>& t) {
        std::vector<std::vector<std::string>> g;
        for (std::size_t i = 0; i + n <= t.size(); ++i) {
            g.emplace_back(t.begin() + static_cast<long>(i), t.begin() + static_cast<long>(i + n));
        }
        return g;
    };
    auto cg = grams(cand), rg = grams(ref);
    std::vector<bool> used(rg.size(), false);
    double overlap = 0;
    for (const auto& g : cg) {
        for (std::size_t j = 0; j < rg.size(); ++j) {
            if (!used[j] && rg[j] == g) {
                used[j] = true;
                ++overlap;
                break;
            }
        }
    }
    return prf(overlap, static_cast<double>(cg.size()), static_cast<double>(rg.size()));
}

// Tries every subsequence of the shorter side (so keep inputs short).
inline std::size_t lcs_bruteforce(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
    const auto& s = a.size() <= b.size() ? a : b;
    const auto& t = a.size() <= b.size() ? b : a;
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
        std::size_t len = static_cast<std::size_t>(__builtin_popcount(mask));
        if (len <= best) continue;
        std::size_t j = 0;
        bool ok = true;
        for (std::size_t i = 0; i < s.size() && ok; ++i) {
            if (!(mask & (1u << i))) continue;
            while (j < t.size() && t[j] != s[i]) ++j;
            if (j == t.size()) ok = false;
            else ++j;
        }
        if (ok) best = len;
    }
    return best;
}

inline PRF rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
    return prf(static_cast<double>(lcs_bruteforce(cand, ref)), static_cast<double>(cand.size()),
               static_cast<double>(ref.size()));
}

inline double tf_cosine(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::map<std::string, double> ta, tb;
    for (const auto& w : a) ta[w] += 1;
    for (const auto& w : b) tb[w] += 1;
    double dot = 0, na = 0, nb = 0;
    for (const auto& [w, c] : ta) {
        na += c * c;
        auto it = tb.find(w);
        if (it != tb.end()) dot += c * it->second;
    }
    for (const auto& [w, c] : tb) nb += c * c;
    if (na == 0 || nb == 0) return 0.0;
    return dot / std::sqrt(na * nb);
}

}  // namespace oracle

// Random generators for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t next() { return rng_(); }
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
    }

    std::vector<std::string> tokens(int max_len, int vocab) {
        std::vector<std::string> out(static_cast<std::size_t>(uniform(0, max_len)));
        for (auto& t : out) t = "w" + std::to_string(uniform(0, vocab - 1));
        return out;
    }

    std::string word() {
        static const std::vector<std::string> words{
            "the", "transfer", "fee", "club", "striker", "season", "goal", "river", "bank",
            "policy", "climate", "city", "council", "report", "Obiang", "Sampdoria", "2010",
            "million", "résumé", "naïve", "data", "market", "coach", "win", "loss"};
        return pick(words);
    }

    // Free text without sentence terminators.
    std::string phrase(int max_words) {
        int n = uniform(1, max_words);
        std::string out;
        for (int i = 0; i < n; ++i) {
            if (i) out += ' ';
            out += word();
        }
        return out;
    }

    // Arbitrary bytes, biased toward the syntax parsers care about.
    std::string noise(int max_len) {
        static const std::vector<std::string> bits{
            "{{", "}}", "{{document}}", "<STOP>", ".", "!", "?", ":", "1:", "0.5", "%", "[", "]",
            "Add the information of", "remove THE information of ", "Do nothing", "shorten the summary",
            "Scores:", "\n", " ", "\xE2\x80\x94", "\xF0\x9F\x98\x80", "\xFF", "\x01", "score 5: 1"};
        std::string out;
        int n = uniform(0, max_len);
        for (int i = 0; i < n; ++i) {
            if (coin(0.3)) out.push_back(static_cast<char>(uniform(0, 255)));
            else out += pick(bits);
        }
        return out;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Scripted transport: answers are produced by a callback and every request is logged.
class FakeTransport final : public summit::HttpTransport {
public:
    using Handler = std::function<summit::HttpResponse(const summit::HttpRequest&, int call)>;
    explicit FakeTransport(Handler h) : handler_(std::move(h)) {}

    summit::HttpResponse post(const summit::HttpRequest& request) override {
        std::lock_guard lock(mu_);
        requests.push_back(request);
        return handler_(request, static_cast<int>(requests.size()));
    }

    std::vector<summit::HttpRequest> requests;

private:
    std::mutex mu_;
    Handler handler_;
};

inline std::string chat_reply(const std::string& text, int prompt = 10, int completion = 5) {
    nlohmann::json j{{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}},
                     {"usage", {{"prompt_tokens", prompt}, {"completion_tokens", completion}}}};
    return j.dump();
}

class TempDir {
public:
    TempDir() {
        static std::mutex mu;
        static int counter = 0;
        std::lock_guard lock(mu);
        path_ = std::filesystem::temp_directory_path() /
                ("summit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(SUMMIT_FIXTURE_DIR) / name;
}

inline summit::ScriptStep step(std::string match, std::string response, bool repeat = false) {
    summit::ScriptStep s;
    s.match = match.empty() ? summit::ScriptStep::Match::Any : summit::ScriptStep::Match::Substring;
    s.pattern = std::move(match);
    s.response = std::move(response);
    s.repeat = repeat;
    return s;
}

inline const std::string kLongDoc =
    "Obiang joined Sampdoria in 2010 after three seasons in the Spanish second division. "
    "He made forty appearances for the Italian club before moving to London in 2012. "
    "The midfielder signed a four year contract worth a reported five million pounds.";

}  // namespace testsupport
