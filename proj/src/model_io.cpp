#include "vinecg/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vinecg/errors.hpp"

namespace vinecg {

using json = nlohmann::json;

std::string save(const VineModel& m) {
    if (const auto report = validate(m); !report.empty())
        throw StructureError("save: model is not a valid vine computational graph: " + report.front());

    std::vector<const CopulaVertex*> verts;
    for (int k = 0; k < m.num_levels(); ++k)
        for (const CopulaVertex& v : m.level(k)) verts.push_back(&v);
    std::sort(verts.begin(), verts.end(), [](const CopulaVertex* a, const CopulaVertex* b) {
        if (a->level() != b->level()) return a->level() < b->level();
        if (a->left != b->left) return a->left < b->left;
        return a->right < b->right;
    });

    json doc;
    doc["schema_version"] = 1;
    doc["d"] = m.dim();
    json arr = json::array();
    for (const CopulaVertex* v : verts) {
        if (!v->copula.has_value())
            throw StructureError("save: vertex {" + v->key() + "} has no fitted copula");
        json rec;
        rec["left"] = v->left;
        rec["right"] = v->right;
        rec["cond"] = v->conditioning.to_vector();
        rec["family"] = family_name(v->copula->family());
        rec["rotation"] = static_cast<int>(v->copula->rotation());
        rec["theta"] = v->copula->theta();
        arr.push_back(std::move(rec));
    }
    doc["vertices"] = std::move(arr);
    if (!m.default_order.empty()) doc["default_order"] = m.default_order;
    if (!m.cond_set.empty()) doc["cond_set"] = m.cond_set.to_vector();
    if (!m.provenance.empty()) doc["provenance"] = m.provenance;
    return doc.dump(2) + "\n";
}

namespace {

const json& require(const json& obj, const char* field, const std::string& where) {
    const auto it = obj.find(field);
    if (it == obj.end()) throw DataError("model document: missing field \"" + std::string(field) + "\" in " + where);
    return *it;
}

int require_int(const json& obj, const char* field, const std::string& where) {
    const json& v = require(obj, field, where);
    if (!v.is_number_integer()) throw DataError("model document: field \"" + std::string(field) + "\" in " + where + " must be an integer");
    return v.get<int>();
}

}  // namespace

VineModel load(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError("model document: parse error at byte offset " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw DataError("model document: top level must be an object");

    const int schema = require_int(doc, "schema_version", "document");
    if (schema != 1) throw DataError("model document: unsupported schema_version " + std::to_string(schema));
    const int d = require_int(doc, "d", "document");
    if (d < 2 || d > 64) throw DataError("model document: field \"d\" must lie in [2, 64], got " + std::to_string(d));

    const json& verts = require(doc, "vertices", "document");
    if (!verts.is_array()) throw DataError("model document: field \"vertices\" must be an array");
    if (verts.size() != static_cast<std::size_t>(d * (d - 1) / 2))
        throw DataError("model document: expected " + std::to_string(d * (d - 1) / 2) +
                        " vertex records for d=" + std::to_string(d) + ", got " + std::to_string(verts.size()));

    std::vector<std::vector<CopulaVertex>> levels(static_cast<std::size_t>(d - 1));
    std::size_t idx = 0;
    for (const json& rec : verts) {
        const std::string where = "vertices[" + std::to_string(idx++) + "]";
        if (!rec.is_object()) throw DataError("model document: " + where + " must be an object");
        const int left = require_int(rec, "left", where);
        const int right = require_int(rec, "right", where);
        if (left < 0 || right < 0 || left >= d || right >= d || left == right)
            throw DataError("model document: " + where + " has an invalid conditioned pair");
        const json& cond_json = require(rec, "cond", where);
        if (!cond_json.is_array()) throw DataError("model document: " + where + ".cond must be an array");
        VarSet cond;
        for (const json& c : cond_json) {
            if (!c.is_number_integer()) throw DataError("model document: " + where + ".cond must hold integers");
            const int v = c.get<int>();
            if (v < 0 || v >= d) throw DataError("model document: " + where + ".cond variable out of range");
            cond.insert(v);
        }
        const json& fam_json = require(rec, "family", where);
        if (!fam_json.is_string()) throw DataError("model document: " + where + ".family must be a string");
        const int rot_deg = require_int(rec, "rotation", where);
        if (rot_deg != 0 && rot_deg != 90 && rot_deg != 180 && rot_deg != 270)
            throw DataError("model document: " + where + ".rotation must be one of 0/90/180/270");
        const json& theta_json = require(rec, "theta", where);
        if (!theta_json.is_number()) throw DataError("model document: " + where + ".theta must be a number");

        BivariateCopula cop;
        try {
            cop = BivariateCopula(family_from_name(fam_json.get<std::string>()),
                                  static_cast<Rotation>(rot_deg), theta_json.get<double>());
        } catch (const std::domain_error& e) {
            throw DataError("model document: " + where + ": " + e.what());
        }
        CopulaVertex cv(left, right, cond, cop);
        if (cv.level() >= d - 1)
            throw DataError("model document: " + where + " has a conditioning set too large for d=" + std::to_string(d));
        if (cond.contains(left) || cond.contains(right))
            throw DataError("model document: " + where + " has conditioned variables inside cond");
        levels[static_cast<std::size_t>(cv.level())].push_back(std::move(cv));
    }

    VineModel m(d, std::move(levels));
    if (const auto it = doc.find("default_order"); it != doc.end()) {
        if (!it->is_array()) throw DataError("model document: field \"default_order\" must be an array");
        for (const json& v : *it) m.default_order.push_back(v.get<int>());
    }
    if (const auto it = doc.find("cond_set"); it != doc.end()) {
        if (!it->is_array()) throw DataError("model document: field \"cond_set\" must be an array");
        for (const json& v : *it) m.cond_set.insert(v.get<int>());
    }
    if (const auto it = doc.find("provenance"); it != doc.end()) {
        if (!it->is_string()) throw DataError("model document: field \"provenance\" must be a string");
        m.provenance = it->get<std::string>();
    }

    if (const auto report = validate(m); !report.empty()) {
        std::string msg = "model document: structural validation failed:";
        for (const std::string& r : report) msg += "\n  - " + r;
        throw StructureError(msg);
    }
    return m;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

DataMatrix read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("csv: empty file");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    DataMatrix out;
    out.names = split_line(std::move(line));
    out.d = out.names.size();
    if (out.d == 0) throw DataError("csv: empty header");

    std::vector<std::vector<double>> cols(out.d);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const std::vector<std::string> cells = split_line(std::move(line));
        if (cells.size() != out.d)
            throw DataError("csv: line " + std::to_string(lineno) + ": expected " + std::to_string(out.d) +
                            " fields, got " + std::to_string(cells.size()));
        for (std::size_t j = 0; j < out.d; ++j) {
            double v = 0.0;
            const char* first = cells[j].data();
            const char* last = first + cells[j].size();
            const auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc{} || res.ptr != last)
                throw DataError("csv: line " + std::to_string(lineno) + ", column " + std::to_string(j + 1) +
                                ": not a number: \"" + cells[j] + "\"");
            cols[j].push_back(v);
        }
    }
    out.n = cols[0].size();
    if (out.n < 2) throw DataError("csv: need at least 2 data rows, got " + std::to_string(out.n));
    out.values.reserve(out.n * out.d);
    for (std::size_t j = 0; j < out.d; ++j)
        out.values.insert(out.values.end(), cols[j].begin(), cols[j].end());
    return out;
}

DataMatrix read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("csv: cannot open \"" + path + "\"");
    return read_csv(in);
}

void write_csv(std::ostream& out, const std::vector<std::string>& names, const SampleBatch& batch) {
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j > 0) out << ',';
        out << names[j];
    }
    out << '\n';
    for (std::size_t i = 0; i < batch.n; ++i) {
        for (int j = 0; j < batch.d; ++j) {
            if (j > 0) out << ',';
            out << format_double(batch.at(i, j));
        }
        out << '\n';
    }
}

}  // namespace vinecg
