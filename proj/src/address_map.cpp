#include "clrsim/address_map.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace clrsim {

namespace {

bool is_pow2(int64_t v) { return v >= 1 && (v & (v - 1)) == 0; }

int log2_exact(int64_t v) {
  int bits = 0;
  while (v > 1) {
    v >>= 1;
    ++bits;
  }
  return bits;
}

int64_t field_dimension(AddrField f, const DramTopology& t) {
  switch (f) {
    case AddrField::Channel: return t.channels;
    case AddrField::Rank: return t.ranks_per_channel;
    case AddrField::BankGroup: return t.bankgroups_per_rank;
    case AddrField::Bank: return t.banks_per_bankgroup;
    case AddrField::Row: return t.rows_per_bank();
    case AddrField::Column: return t.columns_per_row;
    case AddrField::ByteInColumn: return t.bytes_per_column;
  }
  return 1;
}

}  // namespace

void DramTopology::validate() const {
  auto check = [](int64_t v, const char* name) {
    if (!is_pow2(v))
      throw SimError(std::string("topology field ") + name +
                     " must be a power of two >= 1");
  };
  check(channels, "channels");
  check(ranks_per_channel, "ranks_per_channel");
  check(bankgroups_per_rank, "bankgroups_per_rank");
  check(banks_per_bankgroup, "banks_per_bankgroup");
  check(subarrays_per_bank, "subarrays_per_bank");
  check(rows_per_subarray, "rows_per_subarray");
  check(columns_per_row, "columns_per_row");
  check(bytes_per_column, "bytes_per_column");
  if (bus_mhz <= 0) throw SimError("bus_mhz must be positive");
  if (chips_per_rank < 1) throw SimError("chips_per_rank must be >= 1");
}

const char* to_string(AddrField f) {
  switch (f) {
    case AddrField::Channel: return "channel";
    case AddrField::Rank: return "rank";
    case AddrField::BankGroup: return "bankgroup";
    case AddrField::Bank: return "bank";
    case AddrField::Row: return "row";
    case AddrField::Column: return "column";
    case AddrField::ByteInColumn: return "byte";
  }
  return "?";
}

AddressMap::AddressMap(std::vector<Slice> slices, const DramTopology& topo)
    : slices_(std::move(slices)), topo_(topo) {
  topo_.validate();
  int64_t bits_seen[7] = {0, 0, 0, 0, 0, 0, 0};
  address_bits_ = 0;
  for (const auto& s : slices_) {
    if (s.bit_count < 0) throw SimError("address map slice with negative width");
    bits_seen[size_t(s.field)] += s.bit_count;
    address_bits_ += s.bit_count;
  }
  for (int f = 0; f < 7; ++f) {
    int64_t dim = field_dimension(AddrField(f), topo_);
    if (bits_seen[f] != log2_exact(dim))
      throw SimError(std::string("address map gives ") +
                     std::to_string(bits_seen[f]) + " bits to " +
                     to_string(AddrField(f)) + ", topology needs " +
                     std::to_string(log2_exact(dim)));
  }
  if (address_bits_ > 62) throw SimError("address space wider than 62 bits");
}

DramCoord AddressMap::decode(uint64_t phys_addr) const {
  if (phys_addr >= address_space())
    throw SimError("physical address out of range");
  // Slices of one field compose LSB-first within the field as well.
  int64_t fields[7] = {0, 0, 0, 0, 0, 0, 0};
  int consumed[7] = {0, 0, 0, 0, 0, 0, 0};
  int pos = 0;
  for (const auto& s : slices_) {
    uint64_t v = (phys_addr >> pos) & ((uint64_t(1) << s.bit_count) - 1);
    fields[size_t(s.field)] |= int64_t(v) << consumed[size_t(s.field)];
    consumed[size_t(s.field)] += s.bit_count;
    pos += s.bit_count;
  }
  DramCoord c;
  c.channel = int32_t(fields[size_t(AddrField::Channel)]);
  c.rank = int32_t(fields[size_t(AddrField::Rank)]);
  c.bankgroup = int32_t(fields[size_t(AddrField::BankGroup)]);
  c.bank = int32_t(fields[size_t(AddrField::Bank)]);
  c.row = fields[size_t(AddrField::Row)];
  c.column = int32_t(fields[size_t(AddrField::Column)]);
  c.byte = int32_t(fields[size_t(AddrField::ByteInColumn)]);
  return c;
}

uint64_t AddressMap::encode(const DramCoord& coord) const {
  if (!topo_.contains(coord)) throw SimError("coordinate out of range");
  int64_t fields[7];
  fields[size_t(AddrField::Channel)] = coord.channel;
  fields[size_t(AddrField::Rank)] = coord.rank;
  fields[size_t(AddrField::BankGroup)] = coord.bankgroup;
  fields[size_t(AddrField::Bank)] = coord.bank;
  fields[size_t(AddrField::Row)] = coord.row;
  fields[size_t(AddrField::Column)] = coord.column;
  fields[size_t(AddrField::ByteInColumn)] = coord.byte;

  uint64_t addr = 0;
  int consumed[7] = {0, 0, 0, 0, 0, 0, 0};
  int pos = 0;
  for (const auto& s : slices_) {
    uint64_t v = uint64_t(fields[size_t(s.field)]) >> consumed[size_t(s.field)];
    v &= (uint64_t(1) << s.bit_count) - 1;
    addr |= v << pos;
    consumed[size_t(s.field)] += s.bit_count;
    pos += s.bit_count;
  }
  return addr;
}

int AddressMap::pages_per_row_log2(int64_t page_size) const {
  if (!is_pow2(page_size)) throw SimError("page size must be a power of two");
  int offset_bits = log2_exact(page_size);
  int x = 0;
  int pos = 0;
  for (const auto& s : slices_) {
    if (s.field == AddrField::Column || s.field == AddrField::ByteInColumn) {
      // count slice bits whose address position is at or above the offset
      for (int b = 0; b < s.bit_count; ++b)
        if (pos + b >= offset_bits) ++x;
    }
    pos += s.bit_count;
  }
  return x;
}

int AddressMap::rows_per_page_log2(int64_t page_size) const {
  if (!is_pow2(page_size)) throw SimError("page size must be a power of two");
  int offset_bits = log2_exact(page_size);
  int y = 0;
  int pos = 0;
  for (const auto& s : slices_) {
    if (s.field == AddrField::Row) {
      for (int b = 0; b < s.bit_count; ++b)
        if (pos + b < offset_bits) ++y;
    }
    pos += s.bit_count;
  }
  return y;
}

AddressMap AddressMap::parse(const std::string& text,
                             const DramTopology& topo) {
  std::vector<Slice> slices;
  std::stringstream ss(text);
  std::string token;
  int star_index = -1;
  AddrField star_field = AddrField::Row;
  int assigned_bits = 0;
  int64_t star_seen[7] = {0, 0, 0, 0, 0, 0, 0};

  while (std::getline(ss, token, ',')) {
    auto colon = token.find(':');
    if (colon == std::string::npos)
      throw SimError("address map entry '" + token + "' missing ':'");
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      if (a == std::string::npos) return std::string();
      return s.substr(a, b - a + 1);
    };
    std::string name = trim(token.substr(0, colon));
    std::string width = trim(token.substr(colon + 1));

    AddrField field;
    if (name == "channel") field = AddrField::Channel;
    else if (name == "rank") field = AddrField::Rank;
    else if (name == "bankgroup") field = AddrField::BankGroup;
    else if (name == "bank") field = AddrField::Bank;
    else if (name == "row") field = AddrField::Row;
    else if (name == "column") field = AddrField::Column;
    else if (name == "byte") field = AddrField::ByteInColumn;
    else throw SimError("unknown address map field '" + name + "'");

    if (width == "*") {
      if (star_index >= 0)
        throw SimError("address map allows at most one '*' slice");
      star_index = int(slices.size());
      star_field = field;
      slices.push_back({field, 0});
    } else {
      int bits;
      try {
        bits = std::stoi(width);
      } catch (...) {
        throw SimError("bad bit count '" + width + "' in address map");
      }
      slices.push_back({field, bits});
      assigned_bits += bits;
      star_seen[size_t(field)] += bits;
    }
  }
  (void)assigned_bits;
  if (star_index >= 0) {
    int64_t need = log2_exact(field_dimension(star_field, topo)) -
                   star_seen[size_t(star_field)];
    if (need < 0)
      throw SimError("'*' slice on a field that is already fully assigned");
    slices[size_t(star_index)].bit_count = int(need);
  }
  return AddressMap(std::move(slices), topo);
}

AddressMap AddressMap::default_map(const DramTopology& topo) {
  // Bank-group and bank bits sit between column and row bits: a sequential
  // stream fills a whole row before hopping banks, and any footprint larger
  // than banks*row_bytes spreads across every bank.
  std::vector<Slice> slices;
  slices.push_back({AddrField::ByteInColumn,
                    log2_exact(topo.bytes_per_column)});
  slices.push_back({AddrField::Column, log2_exact(topo.columns_per_row)});
  slices.push_back({AddrField::BankGroup,
                    log2_exact(topo.bankgroups_per_rank)});
  slices.push_back({AddrField::Bank, log2_exact(topo.banks_per_bankgroup)});
  slices.push_back({AddrField::Rank, log2_exact(topo.ranks_per_channel)});
  slices.push_back({AddrField::Channel, log2_exact(topo.channels)});
  slices.push_back({AddrField::Row, log2_exact(topo.rows_per_bank())});
  return AddressMap(std::move(slices), topo);
}

std::string AddressMap::to_config_string() const {
  std::string out;
  for (size_t i = 0; i < slices_.size(); ++i) {
    if (i) out += ", ";
    out += to_string(slices_[i].field);
    out += ":";
    out += std::to_string(slices_[i].bit_count);
  }
  return out;
}

}  // namespace clrsim
