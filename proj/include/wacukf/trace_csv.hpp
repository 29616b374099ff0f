#pragma once

#include <charconv>
#include <string>
#include <vector>

#include "wacukf/simnet.hpp"

namespace wacukf::cli {

namespace detail {

/// 17 significant digits: enough for an exact double round trip.
inline void append_number(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, ptr);
}

} // namespace detail

/// Column order: t, x_true_*, y_node<i>_*, xhat_node<i>_*, u_*, e_node<i>_*.
/// Node indices are 1-based in headers; output columns honor per-node masks.
inline std::string trace_to_csv(const simnet::CompiledScenario& cs,
                                const std::vector<simnet::TraceRecord>& trace) {
    std::string out;
    const auto& states = cs.plant.state_names;
    const auto& inputs = cs.plant.input_names;
    const auto& outputs = cs.plant.output_names;
    const std::size_t nodes = trace.empty() ? cs.node_models.size() : trace.front().x_hat.size();

    out += "t";
    for (const auto& sname : states) out += ",x_true_" + sname;
    for (std::size_t i = 0; i < nodes; ++i) {
        if (nodes == cs.node_masks.size()) {
            const auto& mask = cs.node_masks[i];
            for (Index r = 0; r < mask.rows(); ++r) {
                Index idx = 0;
                mask.row(r).maxCoeff(&idx);
                out += ",y_node" + std::to_string(i + 1) + "_" + outputs[static_cast<std::size_t>(idx)];
            }
        } else { // centralized arm: stacked measurement columns
            for (std::size_t j = 0; j < cs.node_masks.size(); ++j) {
                const auto& mask = cs.node_masks[j];
                for (Index r = 0; r < mask.rows(); ++r) {
                    Index idx = 0;
                    mask.row(r).maxCoeff(&idx);
                    out += ",y_node" + std::to_string(j + 1) + "_" +
                           outputs[static_cast<std::size_t>(idx)];
                }
            }
        }
    }
    for (std::size_t i = 0; i < nodes; ++i)
        for (const auto& sname : states) out += ",xhat_node" + std::to_string(i + 1) + "_" + sname;
    for (const auto& iname : inputs) out += ",u_" + iname;
    for (std::size_t i = 0; i < nodes; ++i)
        for (const auto& sname : states) out += ",e_node" + std::to_string(i + 1) + "_" + sname;
    out += "\n";

    for (const auto& rec : trace) {
        detail::append_number(out, rec.t);
        auto append_vec = [&out](const VectorX<double>& v) {
            for (Index i = 0; i < v.size(); ++i) {
                out += ',';
                detail::append_number(out, v(i));
            }
        };
        append_vec(rec.x_true);
        for (const auto& y : rec.y) append_vec(y);
        for (const auto& xh : rec.x_hat) append_vec(xh);
        append_vec(rec.u);
        for (const auto& e : rec.e) append_vec(e);
        out += "\n";
    }
    return out;
}

/// Parses a trace CSV back into header names and numeric rows; numbers are
/// recovered exactly (the writer emits 17 significant digits).
inline std::vector<std::vector<double>> parse_csv(const std::string& text,
                                                  std::vector<std::string>* header = nullptr) {
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            cells.push_back(comma == std::string_view::npos ? line.substr(start)
                                                            : line.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (first) {
            if (header)
                for (auto c : cells) header->emplace_back(c);
            first = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (auto c : cells) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc() || ptr != c.data() + c.size())
                throw ValidationError("trace csv: malformed number '" + std::string(c) + "'");
            row.push_back(v);
        }
        if (!rows.empty() && rows.front().size() != row.size())
            throw ValidationError("trace csv: inconsistent column count");
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace wacukf::cli
