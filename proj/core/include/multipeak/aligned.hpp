#pragma once

#include <cstddef>
#include <new>
#include <vector>

namespace multipeak {

/// 64-byte aligned allocator so every field buffer matches the alignment the
/// transform plans were created with.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), alignment));
  }
  void deallocate(T* ptr, std::size_t) noexcept { ::operator delete(ptr, alignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

/// Grid samples or spectral coefficients of a scalar field.
using Field = std::vector<double, AlignedAllocator<double>>;

}  // namespace multipeak
