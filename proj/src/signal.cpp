#include "pmsim/signal.hpp"

#include <cmath>
#include <sstream>

#include "pmsim/textio.hpp"

namespace pmsim {

Signal constant(double value) {
    Signal s;
    s.kind = Signal::Kind::Constant;
    s.value = value;
    return s;
}

Signal step(double onset, double amplitude) {
    Signal s;
    s.kind = Signal::Kind::Step;
    s.onset = onset;
    s.value = amplitude;
    return s;
}

Signal pulse(double onset, double offset, double amplitude) {
    if (!(onset < offset))
        throw std::invalid_argument("pulse onset must be < offset");
    Signal s;
    s.kind = Signal::Kind::Pulse;
    s.onset = onset;
    s.offset = offset;
    s.value = amplitude;
    return s;
}

Signal sum(std::vector<Signal> terms) {
    Signal s;
    s.kind = Signal::Kind::Sum;
    s.terms = std::move(terms);
    return s;
}

double eval(const Signal& s, double t) {
    switch (s.kind) {
        case Signal::Kind::Constant:
            return s.value;
        case Signal::Kind::Step:
            return t >= s.onset ? s.value : 0.0;
        case Signal::Kind::Pulse:
            return (t >= s.onset && t < s.offset) ? s.value : 0.0;
        case Signal::Kind::Sum: {
            double acc = 0.0;
            for (const Signal& term : s.terms) acc += eval(term, t);
            return acc;
        }
    }
    return 0.0;
}

std::vector<double> sample(const Signal& s, double ts, double duration) {
    if (!(ts > 0.0)) throw std::invalid_argument("sample: ts must be > 0");
    if (!(duration > 0.0)) throw std::invalid_argument("sample: duration must be > 0");
    const long n = static_cast<long>(std::floor(duration / ts));
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n) + 1);
    for (long k = 0; k <= n; ++k) out.push_back(eval(s, static_cast<double>(k) * ts));
    return out;
}

std::string signal_to_text(const Signal& s) {
    switch (s.kind) {
        case Signal::Kind::Constant:
            return "constant " + format_double(s.value);
        case Signal::Kind::Step:
            return "step " + format_double(s.onset) + " " + format_double(s.value);
        case Signal::Kind::Pulse:
            return "pulse " + format_double(s.onset) + " " + format_double(s.offset) +
                   " " + format_double(s.value);
        case Signal::Kind::Sum: {
            std::string out = "sum(";
            for (size_t i = 0; i < s.terms.size(); ++i) {
                out += i == 0 ? " " : " ; ";
                out += signal_to_text(s.terms[i]);
            }
            out += s.terms.empty() ? ")" : " )";
            return out;
        }
    }
    return "constant 0";
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

// Splits the inside of sum( ... ) on top-level ';' only.
std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ';' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Signal parse_signal(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw std::invalid_argument("empty signal");

    if (t.rfind("sum", 0) == 0) {
        std::string rest = trim(t.substr(3));
        if (rest.empty() || rest.front() != '(' || rest.back() != ')')
            throw std::invalid_argument("sum signal must be 'sum( ... )'");
        int depth = 0;  // the trailing ')' must close the leading '('
        for (size_t i = 0; i < rest.size(); ++i) {
            if (rest[i] == '(') ++depth;
            if (rest[i] == ')') {
                --depth;
                if (depth < 0) throw std::invalid_argument("unbalanced ')' in sum signal");
                if (depth == 0 && i + 1 != rest.size())
                    throw std::invalid_argument("trailing text after sum signal");
            }
        }
        if (depth != 0) throw std::invalid_argument("unbalanced '(' in sum signal");
        const std::string inner = rest.substr(1, rest.size() - 2);
        std::vector<Signal> terms;
        if (!trim(inner).empty())
            for (const std::string& part : split_top_level(inner))
                terms.push_back(parse_signal(part));
        return sum(std::move(terms));
    }

    const std::vector<std::string> w = split_words(t);
    auto expect_args = [&](size_t n) {
        if (w.size() != n + 1)
            throw std::invalid_argument("signal '" + w[0] + "' expects " +
                                        std::to_string(n) + " argument(s)");
    };
    if (w[0] == "constant") {
        expect_args(1);
        return constant(parse_double(w[1]));
    }
    if (w[0] == "step") {
        expect_args(2);
        return step(parse_double(w[1]), parse_double(w[2]));
    }
    if (w[0] == "pulse") {
        expect_args(3);
        return pulse(parse_double(w[1]), parse_double(w[2]), parse_double(w[3]));
    }
    throw std::invalid_argument("unknown signal kind '" + w[0] + "'");
}

}  // namespace pmsim
