#pragma once

// Binary field snapshots.  Layout (little-endian, as on every platform this
// runs on):
//   8 bytes magic "GLABFLD1"
//   u32 n, N, kind (0 scalar / 1 form), p, q
//   u8  real_flag (1 if the payload is numerically real; informational)
//   u64 count of complex values
//   count * 2 doubles
// A sidecar "<path>.meta" text file repeats the header for humans.  Loading
// checks the magic and header consistency and reproduces the payload bit for
// bit.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>

#include "glab/grid.hpp"

namespace glab {

namespace detail {

constexpr char field_magic[8] = {'G', 'L', 'A', 'B', 'F', 'L', 'D', '1'};

struct FieldHeader {
  std::uint32_t n, N, kind, p, q;
  std::uint8_t real_flag;
  std::uint64_t count;
};

inline void write_exact(std::FILE* f, const void* buf, std::size_t bytes,
                        const std::string& path) {
  if (std::fwrite(buf, 1, bytes, f) != bytes)
    throw IoError("short write to " + path);
}

inline void read_exact(std::FILE* f, void* buf, std::size_t bytes,
                       const std::string& path) {
  if (std::fread(buf, 1, bytes, f) != bytes)
    throw IoError("short read from " + path);
}

inline bool payload_is_real(const cplx* v, std::uint64_t count) {
  for (std::uint64_t i = 0; i < count; ++i)
    if (v[i].imag() != 0.0) return false;
  return true;
}

inline void save_payload(const std::string& path, const FieldHeader& h,
                         const cplx* v) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_exact(f, field_magic, 8, path);
  write_exact(f, &h.n, 4, path);
  write_exact(f, &h.N, 4, path);
  write_exact(f, &h.kind, 4, path);
  write_exact(f, &h.p, 4, path);
  write_exact(f, &h.q, 4, path);
  write_exact(f, &h.real_flag, 1, path);
  write_exact(f, &h.count, 8, path);
  write_exact(f, v, sizeof(cplx) * h.count, path);
  if (std::fclose(f) != 0) throw IoError("close failed on " + path);

  std::FILE* m = std::fopen((path + ".meta").c_str(), "w");
  if (!m) throw IoError("cannot open " + path + ".meta for writing");
  std::fprintf(m,
               "format: GLABFLD1\nkind: %s\nn: %u\nN: %u\np: %u\nq: %u\n"
               "real: %u\ncomplex_values: %llu\n",
               h.kind == 0 ? "scalar" : "form", h.n, h.N, h.p, h.q,
               h.real_flag, static_cast<unsigned long long>(h.count));
  std::fclose(m);
}

inline FieldHeader load_header(std::FILE* f, const std::string& path) {
  char magic[8];
  read_exact(f, magic, 8, path);
  if (std::memcmp(magic, field_magic, 8) != 0)
    throw SchemaMismatch(path + " is not a field snapshot (bad magic)");
  FieldHeader h{};
  read_exact(f, &h.n, 4, path);
  read_exact(f, &h.N, 4, path);
  read_exact(f, &h.kind, 4, path);
  read_exact(f, &h.p, 4, path);
  read_exact(f, &h.q, 4, path);
  read_exact(f, &h.real_flag, 1, path);
  read_exact(f, &h.count, 8, path);
  return h;
}

} // namespace detail

inline void save_scalar(const std::string& path, const ScalarField& u) {
  detail::FieldHeader h{};
  h.n = static_cast<std::uint32_t>(u.grid.n());
  h.N = static_cast<std::uint32_t>(u.grid.N());
  h.kind = 0;
  h.count = u.grid.nodes();
  h.real_flag = detail::payload_is_real(u.v.data(), h.count) ? 1 : 0;
  detail::save_payload(path, h, u.v.data());
}

inline ScalarField load_scalar(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  auto h = detail::load_header(f, path);
  if (h.kind != 0) {
    std::fclose(f);
    throw SchemaMismatch(path + " holds a form, not a scalar");
  }
  ScalarField u{PeriodicGrid(static_cast<int>(h.n), static_cast<int>(h.N))};
  if (h.count != u.grid.nodes()) {
    std::fclose(f);
    throw SchemaMismatch(path + ": node count disagrees with (n,N)");
  }
  detail::read_exact(f, u.v.data(), sizeof(cplx) * h.count, path);
  std::fclose(f);
  return u;
}

inline void save_form(const std::string& path, const FormField& A) {
  detail::FieldHeader h{};
  h.n = static_cast<std::uint32_t>(A.grid().n());
  h.N = static_cast<std::uint32_t>(A.grid().N());
  h.kind = 1;
  h.p = static_cast<std::uint32_t>(A.p());
  h.q = static_cast<std::uint32_t>(A.q());
  h.count = A.raw().size();
  h.real_flag = detail::payload_is_real(A.raw().data(), h.count) ? 1 : 0;
  detail::save_payload(path, h, A.raw().data());
}

inline FormField load_form(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  auto h = detail::load_header(f, path);
  if (h.kind != 1) {
    std::fclose(f);
    throw SchemaMismatch(path + " holds a scalar, not a form");
  }
  FormField A{PeriodicGrid(static_cast<int>(h.n), static_cast<int>(h.N)),
              static_cast<int>(h.p), static_cast<int>(h.q)};
  if (h.count != A.raw().size()) {
    std::fclose(f);
    throw SchemaMismatch(path + ": component count disagrees with header");
  }
  detail::read_exact(f, A.raw().data(), sizeof(cplx) * h.count, path);
  std::fclose(f);
  return A;
}

} // namespace glab
