#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wacukf/scenario.hpp"

namespace wacukf::cli {

/// Scenario files are line-oriented key/value text:
///
///   # comment
///   duration = 50.0
///   [plant]
///   type = cruise
///   poles = [-4+4i, -4-4i]
///
/// Sections nest keys as section.key; values are numbers, booleans, bare
/// words, quoted strings, complex literals (a+bi) or flat lists thereof.
/// Unknown keys are rejected when the scenario is built.

struct ScnScalar {
    enum class Kind { number, complex, boolean, text };
    Kind kind = Kind::number;
    double number = 0.0;
    std::complex<double> cplx;
    bool flag = false;
    std::string text;
    std::string raw; ///< original token for numbers (keeps 64-bit seeds exact)
};

struct ScnEntry {
    std::string key; ///< full dotted path
    bool is_list = false;
    ScnScalar scalar;
    std::vector<ScnScalar> list;
    int line = 0;
};

struct ScenarioDocument {
    std::string source_name;
    std::vector<ScnEntry> entries;
};

struct ParseError : ValidationError {
    using ValidationError::ValidationError;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_number(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1); // from_chars rejects '+'
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

inline bool parse_complex(std::string_view token, std::complex<double>& out) {
    if (token.empty() || token.back() != 'i') return false;
    std::string_view body = token.substr(0, token.size() - 1);
    // Split at the last sign that is not a leading sign or an exponent sign.
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    double re = 0.0, im = 0.0;
    if (split == std::string_view::npos) {
        std::string_view imag = body;
        if (imag.empty() || imag == "+") im = 1.0;
        else if (imag == "-") im = -1.0;
        else if (!parse_number(imag, im)) return false;
    } else {
        std::string_view real = body.substr(0, split);
        std::string_view imag = body.substr(split);
        if (!parse_number(real, re)) return false;
        if (imag == "+") im = 1.0;
        else if (imag == "-") im = -1.0;
        else if (!parse_number(imag, im)) return false;
    }
    out = {re, im};
    return true;
}

inline bool is_word(std::string_view token) {
    if (token.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(token[0])) || token[0] == '_')) return false;
    for (char c : token)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

inline ScnScalar parse_scalar(std::string_view token, const std::string& where, int line) {
    token = trim(token);
    ScnScalar v;
    if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
        v.kind = ScnScalar::Kind::text;
        v.text = std::string(token.substr(1, token.size() - 2));
        return v;
    }
    if (token == "true" || token == "false") {
        v.kind = ScnScalar::Kind::boolean;
        v.flag = token == "true";
        return v;
    }
    if (parse_number(token, v.number)) {
        v.kind = ScnScalar::Kind::number;
        v.raw = std::string(token);
        return v;
    }
    if (parse_complex(token, v.cplx)) {
        v.kind = ScnScalar::Kind::complex;
        return v;
    }
    if (is_word(token)) {
        v.kind = ScnScalar::Kind::text;
        v.text = std::string(token);
        return v;
    }
    throw ParseError(where + ":" + std::to_string(line) + ": cannot parse value '" +
                     std::string(token) + "'");
}

inline std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        else if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

} // namespace detail

inline ScnEntry parse_entry(std::string_view key, std::string_view value, const std::string& where,
                            int line) {
    ScnEntry entry;
    entry.key = std::string(detail::trim(key));
    entry.line = line;
    value = detail::trim(value);
    if (!value.empty() && value.front() == '[') {
        if (value.back() != ']')
            throw ParseError(where + ":" + std::to_string(line) + ": unterminated list");
        entry.is_list = true;
        std::string_view body = value.substr(1, value.size() - 2);
        std::size_t start = 0;
        bool any = !detail::trim(body).empty();
        while (any) {
            std::size_t comma = body.find(',', start);
            std::string_view item = comma == std::string_view::npos
                                        ? body.substr(start)
                                        : body.substr(start, comma - start);
            entry.list.push_back(detail::parse_scalar(item, where, line));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    } else {
        entry.scalar = detail::parse_scalar(value, where, line);
    }
    return entry;
}

inline ScenarioDocument parse_document(std::string_view text, const std::string& source_name) {
    ScenarioDocument doc;
    doc.source_name = source_name;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = eol == std::string_view::npos ? text.substr(pos)
                                                             : text.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string_view stripped = detail::trim(detail::strip_comment(raw));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ParseError(source_name + ":" + std::to_string(line_no) +
                                 ": malformed section header");
            section = std::string(detail::trim(stripped.substr(1, stripped.size() - 2)));
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = std::string(detail::trim(stripped.substr(0, eq)));
        if (key.empty())
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        doc.entries.push_back(parse_entry(key, stripped.substr(eq + 1), source_name, line_no));
    }
    return doc;
}

inline ScenarioDocument load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_document(buffer.str(), path);
}

/// Applies `key.path=value` overrides; later entries win over earlier ones.
inline void apply_overrides(ScenarioDocument& doc, const std::vector<std::string>& overrides) {
    for (const std::string& ov : overrides) {
        const std::size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw ParseError("override '" + ov + "' must look like key.path=value");
        ScnEntry entry = parse_entry(ov.substr(0, eq), ov.substr(eq + 1), "--set " + ov, 0);
        bool replaced = false;
        for (auto& existing : doc.entries)
            if (existing.key == entry.key) {
                existing = entry;
                replaced = true;
                break;
            }
        if (!replaced) doc.entries.push_back(std::move(entry));
    }
}

namespace detail {

class EntryReader {
  public:
    EntryReader(const ScenarioDocument& doc) : doc_(doc), used_(doc.entries.size(), false) {}

    const ScnEntry* find(const std::string& key) {
        const ScnEntry* hit = nullptr;
        for (std::size_t i = 0; i < doc_.entries.size(); ++i)
            if (doc_.entries[i].key == key) {
                hit = &doc_.entries[i];
                used_[i] = true;
            }
        return hit;
    }

    double number(const std::string& key, double fallback) {
        const ScnEntry* e = find(key);
        if (!e) return fallback;
        require(e, !e->is_list && e->scalar.kind == ScnScalar::Kind::number, "a number");
        return e->scalar.number;
    }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
        const ScnEntry* e = find(key);
        if (!e) return fallback;
        require(e, !e->is_list && e->scalar.kind == ScnScalar::Kind::number, "an integer");
        std::uint64_t out = 0;
        const std::string& raw = e->scalar.raw;
        auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), out);
        if (ec == std::errc() && ptr == raw.data() + raw.size()) return out;
        return static_cast<std::uint64_t>(e->scalar.number);
    }

    bool boolean(const std::string& key, bool fallback) {
        const ScnEntry* e = find(key);
        if (!e) return fallback;
        require(e, !e->is_list && e->scalar.kind == ScnScalar::Kind::boolean, "true or false");
        return e->scalar.flag;
    }

    std::string word(const std::string& key, const std::string& fallback) {
        const ScnEntry* e = find(key);
        if (!e) return fallback;
        require(e, !e->is_list && e->scalar.kind == ScnScalar::Kind::text, "an identifier");
        return e->scalar.text;
    }

    std::vector<double> numbers(const std::string& key) {
        const ScnEntry* e = find(key);
        if (!e) return {};
        require(e, e->is_list, "a list");
        std::vector<double> out;
        for (const auto& item : e->list) {
            require(e, item.kind == ScnScalar::Kind::number, "numbers");
            out.push_back(item.number);
        }
        return out;
    }

    std::vector<std::complex<double>> complex_numbers(const std::string& key) {
        const ScnEntry* e = find(key);
        if (!e) return {};
        require(e, e->is_list, "a list");
        std::vector<std::complex<double>> out;
        for (const auto& item : e->list) {
            if (item.kind == ScnScalar::Kind::number) out.emplace_back(item.number, 0.0);
            else if (item.kind == ScnScalar::Kind::complex) out.push_back(item.cplx);
            else require(e, false, "real or complex numbers");
        }
        return out;
    }

    std::vector<std::string> words(const std::string& key) {
        const ScnEntry* e = find(key);
        if (!e) return {};
        require(e, e->is_list, "a list");
        std::vector<std::string> out;
        for (const auto& item : e->list) {
            require(e, item.kind == ScnScalar::Kind::text ||
                           item.kind == ScnScalar::Kind::number,
                    "words");
            out.push_back(item.kind == ScnScalar::Kind::text ? item.text
                                                             : std::to_string(item.number));
        }
        return out;
    }

    void reject_unknown() const {
        for (std::size_t i = 0; i < doc_.entries.size(); ++i)
            if (!used_[i])
                throw ValidationError(doc_.source_name + ":" +
                                      std::to_string(doc_.entries[i].line) + ": unknown key '" +
                                      doc_.entries[i].key + "'");
    }

  private:
    void require(const ScnEntry* e, bool ok, const std::string& expected) const {
        if (!ok)
            throw ValidationError(doc_.source_name + ":" + std::to_string(e->line) + ": key '" +
                                  e->key + "' expects " + expected);
    }

    const ScenarioDocument& doc_;
    std::vector<bool> used_;
};

inline simnet::Schedule schedule_from(const std::vector<double>& flat, const std::string& key) {
    if (flat.size() % 2 != 0)
        throw ValidationError(key + ": schedule must hold flattened (time, value) pairs");
    simnet::Schedule s;
    for (std::size_t i = 0; i < flat.size(); i += 2) s.points.emplace_back(flat[i], flat[i + 1]);
    return s;
}

} // namespace detail

inline simnet::Scenario build_scenario(const ScenarioDocument& doc) {
    using namespace simnet;
    detail::EntryReader reader(doc);
    Scenario s;

    s.name = reader.word("name", "");
    s.duration = reader.number("duration", s.duration);
    s.ts = reader.number("ts", 0.0);
    s.rng_seed = reader.u64("rng_seed", 0);

    const std::string plant_type = reader.word("plant.type", "cruise");
    if (plant_type == "cruise") s.plant.type = PlantType::cruise;
    else if (plant_type == "suspension") s.plant.type = PlantType::suspension;
    else if (plant_type == "aircraft") s.plant.type = PlantType::aircraft;
    else if (plant_type == "motor") s.plant.type = PlantType::motor;
    else if (plant_type == "motor_speed") s.plant.type = PlantType::motor_speed;
    else throw ValidationError(doc.source_name + ": plant.type: unknown plant '" + plant_type + "'");

    switch (s.plant.type) {
        case PlantType::cruise:
            s.plant.cruise.m = reader.number("plant.m", s.plant.cruise.m);
            s.plant.cruise.b = reader.number("plant.b", s.plant.cruise.b);
            break;
        case PlantType::suspension: {
            auto& p = s.plant.suspension;
            p.M1 = reader.number("plant.M1", p.M1);
            p.M2 = reader.number("plant.M2", p.M2);
            p.k1 = reader.number("plant.k1", p.k1);
            p.k2 = reader.number("plant.k2", p.k2);
            p.b1 = reader.number("plant.b1", p.b1);
            p.b2 = reader.number("plant.b2", p.b2);
            break;
        }
        case PlantType::aircraft: {
            auto& p = s.plant.aircraft;
            p.c1 = reader.number("plant.c1", p.c1);
            p.c2 = reader.number("plant.c2", p.c2);
            p.c3 = reader.number("plant.c3", p.c3);
            p.c4 = reader.number("plant.c4", p.c4);
            p.c5 = reader.number("plant.c5", p.c5);
            p.c6 = reader.number("plant.c6", p.c6);
            p.c7 = reader.number("plant.c7", p.c7);
            break;
        }
        case PlantType::motor:
        case PlantType::motor_speed: {
            auto& p = s.plant.motor;
            p.J = reader.number("plant.J", p.J);
            p.b = reader.number("plant.b", p.b);
            p.kappa = reader.number("plant.kappa", p.kappa);
            p.R = reader.number("plant.R", p.R);
            p.L = reader.number("plant.L", p.L);
            break;
        }
    }

    const std::string ctrl = reader.word("control.type", "state_feedback");
    if (ctrl == "none") s.control.type = ControllerType::none;
    else if (ctrl == "state_feedback") s.control.type = ControllerType::state_feedback;
    else if (ctrl == "lqr") s.control.type = ControllerType::lqr;
    else if (ctrl == "pid") s.control.type = ControllerType::pid;
    else if (ctrl == "compensator") s.control.type = ControllerType::compensator;
    else throw ValidationError(doc.source_name + ": control.type: unknown controller '" + ctrl + "'");
    s.control.poles = reader.complex_numbers("control.poles");
    s.control.lqr_p = reader.number("control.p", s.control.lqr_p);
    s.control.lqr_r = reader.number("control.rw", s.control.lqr_r);
    s.control.kp = reader.number("control.kp", 0.0);
    s.control.ki = reader.number("control.ki", 0.0);
    s.control.kd = reader.number("control.kd", 0.0);
    s.control.comp_z0 = reader.number("control.z0", s.control.comp_z0);
    s.control.comp_p0 = reader.number("control.p0", s.control.comp_p0);
    s.control.comp_gain = reader.number("control.gain", s.control.comp_gain);
    const std::string kind = reader.word("control.kind", "lag");
    if (kind == "lag") s.control.comp_kind = control::CompensatorKind::lag;
    else if (kind == "lead") s.control.comp_kind = control::CompensatorKind::lead;
    else throw ValidationError(doc.source_name + ": control.kind: expected lag or lead");
    const std::string fb = reader.word("control.feedback", "estimate");
    if (fb == "estimate") s.control.feedback = FeedbackSource::estimate;
    else if (fb == "truth") s.control.feedback = FeedbackSource::truth;
    else throw ValidationError(doc.source_name + ": control.feedback: expected estimate or truth");
    const std::string design = reader.word("control.design", "continuous");
    if (design == "continuous") s.control.design = DesignDomain::continuous;
    else if (design == "discrete") s.control.design = DesignDomain::discrete;
    else throw ValidationError(doc.source_name + ": control.design: expected continuous or discrete");
    s.control.tracked_output = static_cast<Index>(reader.number("control.tracked_output", 0.0));

    s.reference = detail::schedule_from(reader.numbers("reference.schedule"), "reference.schedule");
    s.disturbance =
        detail::schedule_from(reader.numbers("disturbance.schedule"), "disturbance.schedule");

    s.noise.r = reader.number("noise.r", s.noise.r);
    const std::string q_mode = reader.word("noise.q_mode", "diagonal");
    if (q_mode == "diagonal") s.noise.q_mode = QMode::diagonal;
    else if (q_mode == "output") s.noise.q_mode = QMode::output;
    else throw ValidationError(doc.source_name + ": noise.q_mode: expected diagonal or output");
    s.noise.p0 = reader.number("noise.p0", s.noise.p0);
    // Output-weighted process noise defaults its factor to p0 when q is not given.
    const double q_default = s.noise.q_mode == QMode::output ? s.noise.p0 : s.noise.q;
    s.noise.q = reader.number("noise.q", q_default);
    s.noise.process_noise = reader.boolean("noise.process_noise", s.noise.process_noise);

    s.ukf.alpha = reader.number("ukf.alpha", s.ukf.alpha);
    s.ukf.beta = reader.number("ukf.beta", s.ukf.beta);
    s.ukf.kappa = reader.number("ukf.kappa", s.ukf.kappa);

    s.network.nodes = static_cast<Index>(reader.number("network.nodes", 4.0));
    const std::string topo = reader.word("network.topology", "complete");
    if (topo == "complete") s.network.topology = Topology::complete;
    else if (topo == "ring") s.network.topology = Topology::ring;
    else if (topo == "path") s.network.topology = Topology::path;
    else if (topo == "custom") s.network.topology = Topology::custom;
    else throw ValidationError(doc.source_name + ": network.topology: unknown topology '" + topo + "'");
    for (double v : reader.numbers("network.adjacency"))
        s.network.adjacency.push_back(v != 0.0 ? 1 : 0);
    s.network.pi = reader.numbers("network.pi");
    s.network.rounds = static_cast<long>(reader.number("network.l", 5.0));
    s.network.node_outputs = reader.words("network.node_outputs");

    s.x0 = reader.numbers("init.x0");
    s.x0_hat = reader.numbers("init.x0_hat");
    s.error_bound = reader.number("init.error_bound", 0.0);

    reader.reject_unknown();
    return s;
}

inline simnet::Scenario load_scenario(const std::string& path,
                                      const std::vector<std::string>& overrides = {}) {
    ScenarioDocument doc = load_document(path);
    apply_overrides(doc, overrides);
    return build_scenario(doc);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string format_complex(const std::complex<double>& c) {
    if (c.imag() == 0.0) return format_number(c.real());
    std::string s = format_number(c.real());
    if (c.imag() >= 0.0) s += "+";
    s += format_number(c.imag()) + "i";
    return s;
}

template <typename T, typename Fmt>
std::string format_list(const std::vector<T>& items, Fmt fmt) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += fmt(items[i]);
    }
    return out + "]";
}

} // namespace detail

/// Canonical text form; parsing it back yields a field-identical scenario.
inline std::string serialize_scenario(const simnet::Scenario& s) {
    using namespace simnet;
    using detail::format_complex;
    using detail::format_list;
    using detail::format_number;
    std::ostringstream out;
    if (!s.name.empty()) out << "name = \"" << s.name << "\"\n";
    out << "duration = " << format_number(s.duration) << " # s\n";
    if (s.ts > 0.0) out << "ts = " << format_number(s.ts) << " # s\n";
    out << "rng_seed = " << s.rng_seed << "\n\n";

    out << "[plant]\n";
    switch (s.plant.type) {
        case PlantType::cruise:
            out << "type = cruise\n";
            out << "m = " << format_number(s.plant.cruise.m) << " # kg\n";
            out << "b = " << format_number(s.plant.cruise.b) << " # N.s/m\n";
            break;
        case PlantType::suspension:
            out << "type = suspension\n";
            out << "M1 = " << format_number(s.plant.suspension.M1) << " # kg\n";
            out << "M2 = " << format_number(s.plant.suspension.M2) << " # kg\n";
            out << "k1 = " << format_number(s.plant.suspension.k1) << " # N/m\n";
            out << "k2 = " << format_number(s.plant.suspension.k2) << " # N/m\n";
            out << "b1 = " << format_number(s.plant.suspension.b1) << " # N.s/m\n";
            out << "b2 = " << format_number(s.plant.suspension.b2) << " # N.s/m\n";
            break;
        case PlantType::aircraft:
            out << "type = aircraft\n";
            out << "c1 = " << format_number(s.plant.aircraft.c1) << "\n";
            out << "c2 = " << format_number(s.plant.aircraft.c2) << "\n";
            out << "c3 = " << format_number(s.plant.aircraft.c3) << "\n";
            out << "c4 = " << format_number(s.plant.aircraft.c4) << "\n";
            out << "c5 = " << format_number(s.plant.aircraft.c5) << "\n";
            out << "c6 = " << format_number(s.plant.aircraft.c6) << "\n";
            out << "c7 = " << format_number(s.plant.aircraft.c7) << "\n";
            break;
        case PlantType::motor:
        case PlantType::motor_speed:
            out << "type = " << (s.plant.type == PlantType::motor ? "motor" : "motor_speed") << "\n";
            out << "J = " << format_number(s.plant.motor.J) << " # kg.m^2\n";
            out << "b = " << format_number(s.plant.motor.b) << " # N.m.s\n";
            out << "kappa = " << format_number(s.plant.motor.kappa) << " # N.m/A\n";
            out << "R = " << format_number(s.plant.motor.R) << " # Ohm\n";
            out << "L = " << format_number(s.plant.motor.L) << " # H\n";
            break;
    }

    out << "\n[control]\n";
    switch (s.control.type) {
        case ControllerType::none: out << "type = none\n"; break;
        case ControllerType::state_feedback:
            out << "type = state_feedback\n";
            out << "poles = " << format_list(s.control.poles, format_complex) << "\n";
            break;
        case ControllerType::lqr:
            out << "type = lqr\n";
            out << "p = " << format_number(s.control.lqr_p) << "\n";
            out << "rw = " << format_number(s.control.lqr_r) << "\n";
            break;
        case ControllerType::pid:
            out << "type = pid\n";
            out << "kp = " << format_number(s.control.kp) << "\n";
            out << "ki = " << format_number(s.control.ki) << "\n";
            out << "kd = " << format_number(s.control.kd) << "\n";
            break;
        case ControllerType::compensator:
            out << "type = compensator\n";
            out << "z0 = " << format_number(s.control.comp_z0) << "\n";
            out << "p0 = " << format_number(s.control.comp_p0) << "\n";
            out << "gain = " << format_number(s.control.comp_gain) << "\n";
            out << "kind = " << (s.control.comp_kind == control::CompensatorKind::lag ? "lag" : "lead")
                << "\n";
            break;
    }
    out << "feedback = " << (s.control.feedback == FeedbackSource::truth ? "truth" : "estimate")
        << "\n";
    out << "design = "
        << (s.control.design == DesignDomain::discrete ? "discrete" : "continuous") << "\n";
    out << "tracked_output = " << s.control.tracked_output << "\n";

    auto flat = [](const Schedule& sched) {
        std::vector<double> flat_points;
        for (const auto& [t, v] : sched.points) {
            flat_points.push_back(t);
            flat_points.push_back(v);
        }
        return flat_points;
    };
    out << "\n[reference]\n";
    out << "schedule = " << format_list(flat(s.reference), format_number)
        << " # flattened (time s, value) pairs\n";
    out << "\n[disturbance]\n";
    out << "schedule = " << format_list(flat(s.disturbance), format_number)
        << " # flattened (time s, value) pairs\n";

    out << "\n[noise]\n";
    out << "r = " << format_number(s.noise.r) << " # measurement covariance\n";
    out << "q_mode = " << (s.noise.q_mode == QMode::output ? "output" : "diagonal") << "\n";
    out << "q = " << format_number(s.noise.q) << " # process covariance\n";
    out << "p0 = " << format_number(s.noise.p0) << " # initial covariance scale\n";
    out << "process_noise = " << (s.noise.process_noise ? "true" : "false") << "\n";

    out << "\n[ukf]\n";
    out << "alpha = " << format_number(s.ukf.alpha) << "\n";
    out << "beta = " << format_number(s.ukf.beta) << "\n";
    out << "kappa = " << format_number(s.ukf.kappa) << "\n";

    out << "\n[network]\n";
    out << "nodes = " << s.network.nodes << "\n";
    const char* topo = "complete";
    if (s.network.topology == Topology::ring) topo = "ring";
    else if (s.network.topology == Topology::path) topo = "path";
    else if (s.network.topology == Topology::custom) topo = "custom";
    out << "topology = " << topo << "\n";
    if (!s.network.adjacency.empty())
        out << "adjacency = "
            << format_list(s.network.adjacency,
                           [](int v) { return std::string(v ? "1" : "0"); })
            << "\n";
    if (!s.network.pi.empty()) out << "pi = " << format_list(s.network.pi, format_number) << "\n";
    out << "l = " << s.network.rounds << " # consensus iterations per instant\n";
    if (!s.network.node_outputs.empty())
        out << "node_outputs = "
            << format_list(s.network.node_outputs,
                           [](const std::string& m) { return "\"" + m + "\""; })
            << "\n";

    out << "\n[init]\n";
    if (!s.x0.empty()) out << "x0 = " << format_list(s.x0, format_number) << "\n";
    if (!s.x0_hat.empty()) out << "x0_hat = " << format_list(s.x0_hat, format_number) << "\n";
    if (s.error_bound > 0.0)
        out << "error_bound = " << format_number(s.error_bound) << " # declared ||e|| bound\n";
    return out.str();
}

} // namespace wacukf::cli
