#include "clrsim/cpu.hpp"

#include <cmath>

namespace clrsim {

LlcModel::LlcModel(int64_t capacity_bytes, int associativity, int line_bytes)
    : line_bytes_(line_bytes), assoc_(associativity) {
  if (capacity_bytes <= 0 || associativity <= 0 || line_bytes <= 0)
    throw SimError("bad LLC geometry");
  int64_t lines = capacity_bytes / line_bytes;
  if (lines % associativity != 0)
    throw SimError("LLC capacity not divisible by associativity");
  sets_ = size_t(lines / associativity);
  ways_.assign(sets_ * size_t(assoc_), Way{});
}

size_t LlcModel::set_of(uint64_t addr) const {
  return size_t((addr / uint64_t(line_bytes_)) % sets_);
}

bool LlcModel::touch(uint64_t addr, bool allocate) {
  uint64_t tag = addr / uint64_t(line_bytes_);
  Way* base = &ways_[set_of(addr) * size_t(assoc_)];
  ++clock_;
  int victim = 0;
  for (int w = 0; w < assoc_; ++w) {
    if (base[w].stamp >= 0 && base[w].tag == tag) {
      base[w].stamp = clock_;
      ++hits_;
      return true;
    }
    if (base[w].stamp < base[victim].stamp) victim = w;
  }
  ++misses_;
  if (allocate) {
    base[victim].tag = tag;
    base[victim].stamp = clock_;
  }
  return false;
}

bool LlcModel::access_read(uint64_t addr) { return touch(addr, true); }
bool LlcModel::access_write(uint64_t addr) { return touch(addr, false); }

bool LlcModel::probe(uint64_t addr) const {
  uint64_t tag = addr / uint64_t(line_bytes_);
  const Way* base = &ways_[set_of(addr) * size_t(assoc_)];
  for (int w = 0; w < assoc_; ++w)
    if (base[w].stamp >= 0 && base[w].tag == tag) return true;
  return false;
}

Core::Core(int id, const CoreConfig& cfg, std::vector<TraceRecord> trace,
           LlcModel* llc, SendFn send)
    : id_(id), cfg_(cfg), trace_(std::move(trace)), llc_(llc),
      send_(std::move(send)) {
  if (trace_.empty()) throw SimError("core given an empty trace");
  if (cfg_.warmup_instructions >= cfg_.instruction_quota)
    throw SimError("warm-up must be smaller than the instruction quota");
  bubbles_left_ = trace_[0].bubble_count;
  record_pending_ = true;
}

void Core::mark_done(int64_t slot_id) {
  int64_t head = window_.empty() ? 0 : window_.front().id;
  int64_t off = slot_id - head;
  if (off >= 0 && off < int64_t(window_.size()))
    window_[size_t(off)].done = true;
}

void Core::on_read_complete(uint64_t line_addr) {
  auto it = mshr_.find(line_addr);
  if (it == mshr_.end()) return;
  for (int64_t slot : it->second) mark_done(slot);
  mshr_.erase(it);
}

bool Core::dispatch_one() {
  if (int(window_.size()) >= cfg_.window_size) return false;

  if (bubbles_left_ > 0) {
    window_.push_back({next_id_++, true});
    --bubbles_left_;
    return true;
  }
  if (!record_pending_) {
    // advance to the next record (wrapping if the trace replays)
    if (cursor_ + 1 >= trace_.size()) {
      if (!cfg_.replay_trace) {
        trace_done_ = true;
        return false;
      }
      cursor_ = 0;
    } else {
      ++cursor_;
    }
    bubbles_left_ = trace_[cursor_].bubble_count;
    record_pending_ = true;
    if (bubbles_left_ > 0) {
      window_.push_back({next_id_++, true});
      --bubbles_left_;
      return true;
    }
  }

  // memory access of the current record
  const TraceRecord& rec = trace_[cursor_];
  uint64_t line = rec.phys_addr & ~uint64_t(llc_->line_bytes() - 1);

  if (rec.is_write) {
    if (llc_->probe(line)) {
      llc_->access_write(line);
      window_.push_back({next_id_++, true});
    } else {
      if (!send_(true, line, id_)) return false;  // back-pressure, retry
      llc_->access_write(line);
      ++llc_misses_;
      window_.push_back({next_id_++, true});  // stores retire immediately
    }
    record_pending_ = false;
    return true;
  }

  auto mshr_it = mshr_.find(line);
  if (mshr_it != mshr_.end()) {
    // coalesce with the outstanding miss
    window_.push_back({next_id_, false});
    mshr_it->second.push_back(next_id_);
    ++next_id_;
    record_pending_ = false;
    return true;
  }
  if (llc_->probe(line)) {
    llc_->access_read(line);
    window_.push_back({next_id_, false});
    hit_events_.push({cycles_ + cfg_.llc_hit_latency, next_id_});
    ++next_id_;
    record_pending_ = false;
    return true;
  }
  // LLC miss: needs a free MSHR and controller queue space before anything
  // is committed
  if (int(mshr_.size()) >= cfg_.mshrs) return false;
  if (!send_(false, line, id_)) return false;
  llc_->access_read(line);
  ++llc_misses_;
  window_.push_back({next_id_, false});
  mshr_[line].push_back(next_id_);
  ++next_id_;
  record_pending_ = false;
  return true;
}

void Core::tick() {
  ++cycles_;

  while (!hit_events_.empty() && hit_events_.top().cycle <= cycles_) {
    mark_done(hit_events_.top().slot_id);
    hit_events_.pop();
  }

  for (int d = 0; d < cfg_.issue_width; ++d)
    if (!dispatch_one()) break;

  for (int r = 0; r < cfg_.issue_width; ++r) {
    if (window_.empty() || !window_.front().done) break;
    window_.pop_front();
    ++retired_;
  }

  if (!warmup_done_ && retired_ >= cfg_.warmup_instructions) {
    warmup_done_ = true;
    warm_cycles_ = cycles_;
    warm_retired_ = retired_;
    warm_misses_ = llc_misses_;
  }
  if (!quota_done_ && retired_ >= cfg_.instruction_quota) {
    quota_done_ = true;
    quota_cycles_ = cycles_;
    quota_retired_ = retired_;
    quota_misses_ = llc_misses_;
  }
  if (trace_done_ && window_.empty() && !quota_done_) {
    quota_done_ = true;
    quota_cycles_ = cycles_;
    quota_retired_ = retired_;
    quota_misses_ = llc_misses_;
  }
}

double Core::ipc() const {
  int64_t cyc = (quota_done_ ? quota_cycles_ : cycles_) - warm_cycles_;
  int64_t ins = (quota_done_ ? quota_retired_ : retired_) - warm_retired_;
  if (cyc <= 0) return 0.0;
  return double(ins) / double(cyc);
}

double Core::mpki() const {
  int64_t ins = (quota_done_ ? quota_retired_ : retired_) - warm_retired_;
  int64_t mis = (quota_done_ ? quota_misses_ : llc_misses_) - warm_misses_;
  if (ins <= 0) return 0.0;
  return 1000.0 * double(mis) / double(ins);
}

double weighted_speedup(const std::vector<double>& shared_ipcs,
                        const std::vector<double>& alone_ipcs) {
  if (shared_ipcs.size() != alone_ipcs.size())
    throw SimError("weighted speedup needs matching ipc vectors");
  double ws = 0.0;
  for (size_t i = 0; i < shared_ipcs.size(); ++i) {
    if (alone_ipcs[i] <= 0.0)
      throw SimError("weighted speedup with zero alone-IPC");
    ws += shared_ipcs[i] / alone_ipcs[i];
  }
  return ws;
}

double geomean(const std::vector<double>& values) {
  if (values.empty()) throw SimError("geomean of empty set");
  double acc = 0.0;
  for (double v : values) {
    if (v <= 0.0) throw SimError("geomean needs positive values");
    acc += std::log(v);
  }
  return std::exp(acc / double(values.size()));
}

}  // namespace clrsim
