#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace efwe {

/// A complete (uncensored) sample of positive lifetimes. Values are kept
/// sorted ascending; the order they were supplied in is retained separately.
class Dataset {
public:
    /// Throws DomainError when empty or when any value is non-finite or <= 0.
    Dataset(std::vector<double> values, std::string label, std::string source = {});

    const std::vector<double>& values() const noexcept { return sorted_; }
    const std::vector<double>& original() const noexcept { return original_; }
    std::size_t size() const noexcept { return sorted_.size(); }
    const std::string& label() const noexcept { return label_; }
    const std::string& source() const noexcept { return source_; }

    double sum() const;
    double mean() const;
    double median() const;

private:
    std::vector<double> original_;
    std::vector<double> sorted_;
    std::string label_;
    std::string source_;
};

/// Lifetimes of 50 devices put on test (Aarset, 1987).
const Dataset& aarset();

/// Column by zero-based index or by header name.
using Column = std::variant<std::size_t, std::string>;

/// Comma-separated, '.' decimal point, LF or CRLF line ends. A first row
/// whose selected cell is not numeric is taken as the header. Errors carry the
/// 1-based line number of the offending row.
Dataset read_csv(std::istream& in, const Column& column = std::size_t{0},
                 const std::string& label = "csv");

Dataset load_csv(const std::filesystem::path& path, const Column& column = std::size_t{0});

/// Writes a single "time" column in original order, shortest round-trip
/// decimal form.
void write_csv(const Dataset& data, std::ostream& out);
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace efwe
