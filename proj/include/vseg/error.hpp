#pragma once

#include <stdexcept>
#include <string>

namespace vseg {

// Base of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data. The CLI maps these to exit code 2.
class data_error : public error {
 public:
  using error::error;
};

class io_error : public data_error {
 public:
  using data_error::data_error;
};

class dimension_error : public data_error {
 public:
  using data_error::data_error;
};

// A frame index inside the requested range has no file on disk.
class gap_error : public data_error {
 public:
  explicit gap_error(int missing)
      : data_error("missing frame at index " + std::to_string(missing)),
        missing_index(missing) {}

  int missing_index;
};

class insufficient_data_error : public data_error {
 public:
  using data_error::data_error;
};

class degenerate_affinity_error : public data_error {
 public:
  using data_error::data_error;
};

// Invalid parameter values (configuration or API misuse).
class config_error : public error {
 public:
  using error::error;
};

}  // namespace vseg
