#include "threatkg/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tkg {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == delim) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n') {
            auto line = text.substr(start, i - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            out.push_back(line);
            start = i + 1;
        }
    }
    if (start < text.size()) {
        auto line = text.substr(start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
    }
    return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    std::vector<std::size_t> row(a.size() + 1);
    for (std::size_t i = 0; i <= a.size(); ++i) row[i] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
        std::size_t prev = row[0];
        row[0] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            const std::size_t cur = row[i];
            const std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
            row[i] = std::min({row[i] + 1, row[i - 1] + 1, prev + cost});
            prev = cur;
        }
    }
    return row[a.size()];
}

std::vector<std::string> nearest_strings(std::string_view needle,
                                         const std::vector<std::string>& pool,
                                         std::size_t max_dist, std::size_t max_results) {
    std::vector<std::pair<std::size_t, const std::string*>> hits;
    for (const auto& s : pool) {
        // Length gap alone already exceeds the cap -> skip the DP.
        const std::size_t gap = s.size() > needle.size() ? s.size() - needle.size()
                                                         : needle.size() - s.size();
        if (gap > max_dist) continue;
        const std::size_t d = levenshtein(needle, s);
        if (d <= max_dist) hits.emplace_back(d, &s);
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::string> out;
    for (const auto& [d, s] : hits) {
        if (out.size() >= max_results) break;
        out.push_back(*s);
    }
    return out;
}

std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string format_fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

std::string format_sci_trunc2(double x) {
    if (x == 0.0) return "0.00e+00";
    const double ax = std::fabs(x);
    int exp = static_cast<int>(std::floor(std::log10(ax)));
    double mant = ax / std::pow(10.0, exp);
    if (mant >= 10.0) {
        mant /= 10.0;
        ++exp;
    }
    if (mant < 1.0) {
        mant *= 10.0;
        --exp;
    }
    const double trunc = std::floor(mant * 100.0) / 100.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.2fe%+03d", x < 0 ? "-" : "", trunc, exp);
    return buf;
}

std::string format_exact(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace tkg
