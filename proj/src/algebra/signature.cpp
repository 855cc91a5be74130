#include "versor/algebra/signature.hpp"

namespace versor {

const Signature& cl41() {
  static const Signature sig({1, 1, 1, 1, -1});
  return sig;
}

}  // namespace versor
