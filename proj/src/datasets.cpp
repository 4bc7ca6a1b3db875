#include "efwe/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string_view>

#include "efwe/errors.hpp"

namespace efwe {

Dataset::Dataset(std::vector<double> values, std::string label, std::string source)
    : original_(std::move(values)), label_(std::move(label)), source_(std::move(source)) {
    if (original_.empty()) {
        throw DomainError("Dataset: no observations");
    }
    for (std::size_t i = 0; i < original_.size(); ++i) {
        if (!std::isfinite(original_[i]) || !(original_[i] > 0.0)) {
            std::ostringstream msg;
            msg << "Dataset: observation " << i << " = " << original_[i]
                << " is not a finite positive lifetime";
            throw DomainError(msg.str());
        }
    }
    sorted_ = original_;
    std::sort(sorted_.begin(), sorted_.end());
}

double Dataset::sum() const { return std::accumulate(sorted_.begin(), sorted_.end(), 0.0); }

double Dataset::mean() const { return sum() / static_cast<double>(sorted_.size()); }

double Dataset::median() const {
    const std::size_t n = sorted_.size();
    return n % 2 == 1 ? sorted_[n / 2] : 0.5 * (sorted_[n / 2 - 1] + sorted_[n / 2]);
}

const Dataset& aarset() {
    static const Dataset data(
        {0.1, 0.2, 1,  1,  1,  1,  1,  2,  3,  6,  7,  11, 12, 18, 18, 18, 18,
         18,  21,  32, 36, 40, 45, 46, 47, 50, 55, 60, 63, 63, 67, 67, 67, 67,
         72,  75,  79, 82, 82, 83, 84, 84, 84, 85, 85, 85, 85, 85, 86, 86},
        "aarset", "Aarset (1987), lifetimes of 50 devices");
    return data;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
    return value;
}

}  // namespace

Dataset read_csv(std::istream& in, const Column& column, const std::string& label) {
    std::optional<std::size_t> index;
    if (const auto* i = std::get_if<std::size_t>(&column)) index = *i;
    const std::string* name = std::get_if<std::string>(&column);

    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    bool first_content_row = true;
    while (std::getline(in, line)) {
        ++row;
        std::string_view view = line;
        if (row == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (trim(view).empty()) continue;
        const auto cells = split(view);

        if (first_content_row) {
            first_content_row = false;
            if (name) {
                const auto it = std::find(cells.begin(), cells.end(), std::string_view(*name));
                if (it == cells.end()) {
                    throw ParseError("CSV header has no column named '" + *name + "'", row);
                }
                index = static_cast<std::size_t>(it - cells.begin());
                continue;
            }
            if (*index < cells.size() && !parse_number(cells[*index])) {
                continue;  // header row
            }
        }

        if (*index >= cells.size()) {
            std::ostringstream msg;
            msg << "row " << row << ": missing column " << *index;
            throw ParseError(msg.str(), row);
        }
        const std::string_view cell = cells[*index];
        const auto value = parse_number(cell);
        if (!value || !std::isfinite(*value)) {
            std::ostringstream msg;
            msg << "row " << row << ": cannot parse '" << cell << "' as a finite number";
            throw ParseError(msg.str(), row);
        }
        if (!(*value > 0.0)) {
            std::ostringstream msg;
            msg << "row " << row << ": lifetime " << *value << " is not positive";
            throw NonpositiveValueError(msg.str(), row);
        }
        values.push_back(*value);
    }
    if (values.empty()) {
        throw ParseError("CSV contains no observations");
    }
    return Dataset(std::move(values), label);
}

Dataset load_csv(const std::filesystem::path& path, const Column& column) {
    std::ifstream in(path);
    if (!in) {
        throw MissingFileError("cannot open '" + path.string() + "'");
    }
    Dataset data = read_csv(in, column, path.stem().string());
    return Dataset(data.original(), data.label(), path.string());
}

void write_csv(const Dataset& data, std::ostream& out) {
    out << "time\n";
    char buf[32];
    for (double v : data.original()) {
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, ptr - buf);
        out << '\n';
    }
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw MissingFileError("cannot write '" + path.string() + "'");
    }
    write_csv(data, out);
}

}  // namespace efwe
