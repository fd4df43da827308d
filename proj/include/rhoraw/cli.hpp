#ifndef RHORAW_CLI_HPP_
#define RHORAW_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace rhoraw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

// Runs one invocation; args excludes the program name. Reports go to `out`
// (or --report), logs and usage errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace rhoraw::cli

#endif  // RHORAW_CLI_HPP_
