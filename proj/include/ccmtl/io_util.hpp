#pragma once

#include <fstream>
#include <string>

namespace ccmtl {

/// Writes to `<path>.tmp` and renames onto `path` on commit, so an
/// interrupted run never leaves a truncated file behind.
class AtomicFile {
public:
    explicit AtomicFile(std::string path);
    ~AtomicFile();

    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;

    std::ofstream& stream() { return out_; }
    void commit();

private:
    std::string path_;
    std::string tmp_path_;
    std::ofstream out_;
    bool committed_ = false;
};

/// Formats a double with the given number of significant digits ("%.*g").
std::string format_double(double value, int significant_digits);

} // namespace ccmtl
