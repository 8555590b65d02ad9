#include "semscale/sem/tensor.hpp"

#include "semscale/error.hpp"

namespace semscale::sem {

void contract(std::span<const double> mat, std::size_t rows, int dim, Shape3 in_shape, std::span<const double> in,
              std::span<double> out, bool accumulate) {
  const std::size_t cols = in_shape.extent(dim);
  Shape3 out_shape = in_shape;
  if (dim == 0) out_shape.nx = rows;
  else if (dim == 1) out_shape.ny = rows;
  else out_shape.nz = rows;

  if (mat.size() != rows * cols || in.size() != in_shape.size() || out.size() != out_shape.size())
    throw InvalidArgument("contract: size mismatch");

  const std::size_t nx = in_shape.nx, ny = in_shape.ny, nz = in_shape.nz;
  const double* m = mat.data();
  const double* u = in.data();
  double* v = out.data();

  switch (dim) {
  case 0:
    for (std::size_t c = 0; c < nz; ++c)
      for (std::size_t b = 0; b < ny; ++b) {
        const double* col = u + nx * (b + ny * c);
        double* dst = v + rows * (b + ny * c);
        for (std::size_t a = 0; a < rows; ++a) {
          double acc = accumulate ? dst[a] : 0.0;
          const double* row = m + a * cols;
          for (std::size_t i = 0; i < cols; ++i) acc += row[i] * col[i];
          dst[a] = acc;
        }
      }
    break;
  case 1:
    for (std::size_t c = 0; c < nz; ++c) {
      const double* slab = u + nx * ny * c;
      double* dst = v + nx * rows * c;
      for (std::size_t b = 0; b < rows; ++b) {
        double* line = dst + nx * b;
        if (!accumulate)
          for (std::size_t a = 0; a < nx; ++a) line[a] = 0.0;
        const double* row = m + b * cols;
        for (std::size_t j = 0; j < cols; ++j) {
          const double mj = row[j];
          const double* src = slab + nx * j;
          for (std::size_t a = 0; a < nx; ++a) line[a] += mj * src[a];
        }
      }
    }
    break;
  case 2: {
    const std::size_t plane = nx * ny;
    for (std::size_t c = 0; c < rows; ++c) {
      double* dst = v + plane * c;
      if (!accumulate)
        for (std::size_t p = 0; p < plane; ++p) dst[p] = 0.0;
      const double* row = m + c * cols;
      for (std::size_t k = 0; k < cols; ++k) {
        const double mk = row[k];
        const double* src = u + plane * k;
        for (std::size_t p = 0; p < plane; ++p) dst[p] += mk * src[p];
      }
    }
    break;
  }
  default:
    throw InvalidArgument("contract: dim must be 0, 1 or 2");
  }
}

} // namespace semscale::sem
