#pragma once

#include <memory>
#include <utility>

namespace phd {

// Heap cell with value semantics, used to build recursive AST variants.
template <typename T>
class box {
 public:
  box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  box(const box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  box(box&&) noexcept = default;
  box& operator=(const box& other) {
    if (this != &other) {
      ptr_ = std::make_unique<T>(*other.ptr_);
    }
    return *this;
  }
  box& operator=(box&&) noexcept = default;
  ~box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const box& a, const box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

}  // namespace phd
