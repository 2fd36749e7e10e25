#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pxt {

uint64_t fnv1a(std::string_view bytes);
uint64_t hash_file(const std::string& path);
std::string hex64(uint64_t v);

// Fixed %.*g rendering so identical inputs always produce identical bytes.
std::string format_number(double v, int precision = 6);

// Conventional significance markers: *** 1%, ** 5%, * 10%.
std::string significance_stars(double p_value);

// Tab-separated table with a '#' comment header block.
class Table {
  public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void meta(const std::string& key, const std::string& value) {
        meta_.emplace_back(key, value);
    }
    void add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

    std::string to_string() const;
    void write(const std::string& path) const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace pxt
