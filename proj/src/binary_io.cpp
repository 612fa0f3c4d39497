#include "grl/binary_io.hpp"

namespace grl::binio {

void write_magic(std::ostream& out, const Magic& magic) { out.write(magic.data(), 4); }

void expect_magic(std::istream& in, const Magic& expected, const std::string& path) {
  Magic got{};
  in.read(got.data(), 4);
  if (!in || got != expected) {
    throw DataError(path + ": not a " + std::string(expected.data(), 4) + " file (bad magic)");
  }
}

}  // namespace grl::binio
