#pragma once

namespace versor {

#if defined(VERSOR_REAL_FLOAT) && VERSOR_REAL_FLOAT
using real = float;
#else
using real = double;
#endif

}  // namespace versor
