// Acceptance suite: one pass/fail line per criterion. Usage:
//   threatkg_acceptance [criterion...]
// With no arguments every criterion runs. Exit code 0 iff all selected pass.

#include <cstdio>
#include <string>
#include <vector>

namespace acceptance {
bool run_criterion(int id);
const char* criterion_name(int id);
constexpr int kCriteria = 10;
}  // namespace acceptance

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.push_back(std::stoi(argv[i]));
    }
    if (selected.empty()) {
        for (int i = 1; i <= acceptance::kCriteria; ++i) selected.push_back(i);
    }

    bool all_ok = true;
    for (const int id : selected) {
        bool ok = false;
        try {
            ok = acceptance::run_criterion(id);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "criterion %d raised: %s\n", id, e.what());
            ok = false;
        }
        std::printf("[%s] %2d. %s\n", ok ? "PASS" : "FAIL", id,
                    acceptance::criterion_name(id));
        std::fflush(stdout);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
