#pragma once

// Prototype database text file:
//
//   # given_dim=S hidden_dim=D
//   # key=value            (optional metadata lines)
//   g_1,...,g_S,h_1,...,h_D,sigma
//
// Numbers use the shortest round-trip representation, so a database re-read
// reproduces every double bit-exactly.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aeloc/grnn/grnn.hpp"
#include "aeloc/io/text.hpp"

namespace aeloc::grnn {

struct Database {
    PrototypeSet set;
    std::vector<std::pair<std::string, std::string>> metadata;

    const std::string* find(std::string_view key) const {
        for (const auto& [k, v] : metadata)
            if (k == key) return &v;
        return nullptr;
    }
};

inline std::string format_database(const Database& db) {
    std::string out = "# given_dim=" + std::to_string(db.set.given_dim()) +
                      " hidden_dim=" + std::to_string(db.set.hidden_dim()) + "\n";
    for (const auto& [k, v] : db.metadata) out += "# " + k + "=" + v + "\n";
    for (std::size_t n = 0; n < db.set.size(); ++n) {
        const auto& p = db.set[n];
        std::string line;
        for (double v : p.given) line += io::format_double(v) + ",";
        for (double v : p.hidden) line += io::format_double(v) + ",";
        line += io::format_double(db.set.sigmas()[n]);
        out += line + "\n";
    }
    return out;
}

inline void write_database(const std::filesystem::path& path, const Database& db) {
    io::atomic_write(path, format_database(db));
}

inline Database parse_database(std::string_view text, const std::string& origin = "<memory>") {
    std::size_t given_dim = 0, hidden_dim = 0;
    bool have_header = false;
    std::vector<PrototypeVector> prototypes;
    std::vector<double> sigmas;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const auto line = io::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            if (!have_header) {
                constexpr std::string_view g_tag = "# given_dim=", h_tag = " hidden_dim=";
                const auto h_pos = line.find(h_tag);
                if (line.substr(0, g_tag.size()) != g_tag || h_pos == std::string_view::npos)
                    throw IoError("missing '# given_dim=S hidden_dim=D' header");
                given_dim = static_cast<std::size_t>(io::parse_int(line.substr(g_tag.size(), h_pos - g_tag.size())));
                hidden_dim = static_cast<std::size_t>(io::parse_int(line.substr(h_pos + h_tag.size())));
                have_header = true;
                continue;
            }
            if (line.front() == '#') {
                const auto body = io::trim(line.substr(1));
                const auto eq = body.find('=');
                if (eq != std::string_view::npos)
                    metadata.emplace_back(std::string(io::trim(body.substr(0, eq))), std::string(io::trim(body.substr(eq + 1))));
                continue;
            }
            const auto fields = io::split(line, ',');
            if (fields.size() != given_dim + hidden_dim + 1)
                throw IoError("expected " + std::to_string(given_dim + hidden_dim + 1) + " columns, found " +
                              std::to_string(fields.size()));
            PrototypeVector p;
            for (std::size_t i = 0; i < given_dim; ++i) p.given.push_back(io::parse_double(fields[i]));
            for (std::size_t i = 0; i < hidden_dim; ++i) p.hidden.push_back(io::parse_double(fields[given_dim + i]));
            prototypes.push_back(std::move(p));
            sigmas.push_back(io::parse_double(fields.back()));
        } catch (const Error& e) {
            throw IoError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) throw IoError(origin + ": empty prototype database");
    try {
        return {PrototypeSet(std::move(prototypes), std::move(sigmas)), std::move(metadata)};
    } catch (const Error& e) {
        throw IoError(origin + ": " + e.what());
    }
}

inline Database read_database(const std::filesystem::path& path) {
    return parse_database(io::read_file(path), path.string());
}

} // namespace aeloc::grnn
