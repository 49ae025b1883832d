#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace clrsim {

// Global simulation time, counted in memory bus cycles.
using Cycle = int64_t;

constexpr Cycle kNever = -(int64_t(1) << 60);

enum class RowMode : uint8_t { MaxCapacity = 0, HighPerformance = 1 };

inline const char* to_string(RowMode m) {
  return m == RowMode::MaxCapacity ? "max_capacity" : "high_performance";
}

enum class CommandKind : uint8_t { ACT = 0, PRE, RD, WR, REF };

inline const char* to_string(CommandKind k) {
  switch (k) {
    case CommandKind::ACT: return "ACT";
    case CommandKind::PRE: return "PRE";
    case CommandKind::RD: return "RD";
    case CommandKind::WR: return "WR";
    case CommandKind::REF: return "REF";
  }
  return "?";
}

struct DramCoord {
  int32_t channel = 0;
  int32_t rank = 0;
  int32_t bankgroup = 0;
  int32_t bank = 0;
  int64_t row = 0;
  int32_t column = 0;
  int32_t byte = 0;

  bool operator==(const DramCoord&) const = default;
};

struct DramCommand {
  CommandKind kind = CommandKind::ACT;
  DramCoord coord;
  Cycle issue_cycle = 0;
  // REF only: which refresh pool the command belongs to and its bin index.
  RowMode ref_pool = RowMode::MaxCapacity;
  int32_t ref_bin = 0;
};

// Configuration or input errors surface as SimError; timing violations and
// broken internal invariants are bugs and abort the simulation via SimFault.
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

class SimFault : public std::logic_error {
 public:
  explicit SimFault(const std::string& what) : std::logic_error(what) {}
};

}  // namespace clrsim
