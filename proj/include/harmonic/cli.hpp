#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harmonic::cli {

// Exit codes: 0 success, 1 verification mismatch, 2 usage error,
// 3 resource/coverage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1e5", "2.5e3" or plain digits, normalized to an exact integer.
std::uint64_t parse_extent(const std::string& text);

} // namespace harmonic::cli
