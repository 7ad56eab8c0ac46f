#include "hab/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace hab::io {

namespace {

struct CsvFile {
    std::string name;
    std::vector<std::vector<std::string>> rows;  // header excluded
    std::vector<std::size_t> lines;              // 1-based file line per row
};

std::string location(const std::string& name, std::size_t line) {
    return name + " line " + std::to_string(line);
}

CsvFile read_csv(const std::filesystem::path& path,
                 const std::vector<std::string>& expected_header) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    CsvFile file;
    file.name = path.filename().string();
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (!saw_header) {
            if (fields != expected_header) {
                std::string want;
                for (std::size_t i = 0; i < expected_header.size(); ++i)
                    want += (i ? "," : "") + expected_header[i];
                throw InputError(location(file.name, line_no) +
                                 ": header must be exactly '" + want + "'");
            }
            saw_header = true;
            continue;
        }
        if (fields.size() != expected_header.size())
            throw InputError(location(file.name, line_no) + ": expected " +
                             std::to_string(expected_header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        file.rows.push_back(std::move(fields));
        file.lines.push_back(line_no);
    }
    if (!saw_header)
        throw InputError(file.name + ": empty file, header row required");
    return file;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

double parse_csv_double(const std::string& token, const std::string& context) {
    double value = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw InputError(context + ": '" + token + "' is not a number");
    return value;
}

long parse_csv_long(const std::string& token, const std::string& context) {
    long value = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw InputError(context + ": '" + token + "' is not an integer");
    return value;
}

std::vector<SampleMeta> read_metadata_csv(const std::filesystem::path& path) {
    CsvFile file = read_csv(path, {"uid", "latitude", "longitude", "date", "split"});
    std::vector<SampleMeta> out;
    out.reserve(file.rows.size());
    for (std::size_t i = 0; i < file.rows.size(); ++i) {
        const auto& f = file.rows[i];
        std::string ctx = location(file.name, file.lines[i]);
        SampleMeta m;
        m.uid = f[0];
        if (m.uid.empty()) throw InputError(ctx + ": empty uid");
        m.latitude = parse_csv_double(f[1], ctx + " latitude");
        if (!(m.latitude >= -90.0 && m.latitude <= 90.0))
            throw InputError(ctx + ": latitude " + f[1] + " outside [-90, 90]");
        m.longitude = parse_csv_double(f[2], ctx + " longitude");
        if (!(m.longitude >= -180.0 && m.longitude <= 180.0))
            throw InputError(ctx + ": longitude " + f[2] + " outside [-180, 180]");
        try {
            m.date = parse_date(f[3]);
            m.split = parse_split(f[4]);
        } catch (const InputError& e) {
            throw InputError(ctx + ": " + e.what());
        }
        out.push_back(std::move(m));
    }
    return out;
}

void write_metadata_csv(const std::filesystem::path& path,
                        const std::vector<SampleMeta>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out << "uid,latitude,longitude,date,split\n";
    for (const auto& m : rows)
        out << m.uid << ',' << format_double(m.latitude) << ',' << format_double(m.longitude)
            << ',' << format_date(m.date) << ',' << split_name(m.split) << '\n';
}

std::vector<Label> read_labels_csv(const std::filesystem::path& path) {
    CsvFile file = read_csv(path, {"uid", "region", "severity", "density"});
    std::vector<Label> out;
    out.reserve(file.rows.size());
    for (std::size_t i = 0; i < file.rows.size(); ++i) {
        const auto& f = file.rows[i];
        std::string ctx = location(file.name, file.lines[i]);
        Label l;
        l.uid = f[0];
        if (l.uid.empty()) throw InputError(ctx + ": empty uid");
        try {
            l.region = parse_region(f[1]);
        } catch (const InputError& e) {
            throw InputError(ctx + ": " + e.what());
        }
        long sev = parse_csv_long(f[2], ctx + " severity");
        if (sev < 1 || sev > 5)
            throw InputError(ctx + ": severity " + f[2] + " outside 1..5");
        l.severity = static_cast<int>(sev);
        l.density = parse_csv_double(f[3], ctx + " density");
        if (!std::isfinite(l.density) || l.density < 0.0)
            throw InputError(ctx + ": density " + f[3] + " must be non-negative");
        out.push_back(std::move(l));
    }
    return out;
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<Label>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out << "uid,region,severity,density\n";
    for (const auto& l : rows)
        out << l.uid << ',' << region_name(l.region) << ',' << l.severity << ','
            << format_double(l.density) << '\n';
}

PredictionSet read_external_predictions(const std::filesystem::path& path,
                                        std::string model_id) {
    CsvFile file = read_csv(path, {"uid", "fold", "prediction"});
    if (model_id.empty()) model_id = path.stem().string();
    PredictionSet set(std::move(model_id));
    for (std::size_t i = 0; i < file.rows.size(); ++i) {
        const auto& f = file.rows[i];
        std::string ctx = location(file.name, file.lines[i]);
        int fold;
        if (f[1] == "test") {
            fold = PredictionSet::kTestFold;
        } else {
            long v = parse_csv_long(f[1], ctx + " fold");
            if (v < 0 || v > 4)
                throw InputError(ctx + ": fold must be 0..4 or 'test'");
            fold = static_cast<int>(v);
        }
        double value = parse_csv_double(f[2], ctx + " prediction");
        if (!std::isfinite(value))
            throw InputError(ctx + ": non-finite prediction");
        try {
            set.add(f[0], fold, value);
        } catch (const InputError& e) {
            throw InputError(ctx + ": " + e.what());
        }
    }
    return set;
}

void write_predictions_csv(const std::filesystem::path& path, const PredictionSet& set) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out << "uid,fold,prediction\n";
    for (const auto& uid : set.uids()) {
        int fold = set.fold(uid);
        out << uid << ',';
        if (fold == PredictionSet::kTestFold)
            out << "test";
        else
            out << fold;
        out << ',' << format_double(set.value(uid)) << '\n';
    }
}

std::vector<std::pair<std::string, int>> read_severity_csv(
    const std::filesystem::path& path) {
    CsvFile file = read_csv(path, {"uid", "severity"});
    std::vector<std::pair<std::string, int>> out;
    out.reserve(file.rows.size());
    for (std::size_t i = 0; i < file.rows.size(); ++i) {
        const auto& f = file.rows[i];
        std::string ctx = location(file.name, file.lines[i]);
        long sev = parse_csv_long(f[1], ctx + " severity");
        if (sev < 1 || sev > 5)
            throw InputError(ctx + ": severity " + f[1] + " outside 1..5");
        out.emplace_back(f[0], static_cast<int>(sev));
    }
    return out;
}

void write_severity_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<std::string, int>>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out << "uid,severity\n";
    for (const auto& [uid, sev] : rows) out << uid << ',' << sev << '\n';
}

}  // namespace hab::io
