#ifndef MBSTS_DRAWS_IO_HPP_
#define MBSTS_DRAWS_IO_HPP_

#include <string>

#include "mbsts/gibbs.hpp"

namespace mbsts {

// Binary posterior-sample container: a magic line, a JSON header line with
// the dimensions, then raw little-endian doubles. Doubles round-trip exactly,
// so identical runs produce identical files.
void save_draws(const std::string& path, const McmcDraws& draws);
McmcDraws load_draws(const std::string& path);

}  // namespace mbsts

#endif  // MBSTS_DRAWS_IO_HPP_
