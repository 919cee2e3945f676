#include <algorithm>
#include <thread>

#include "arith.hpp"
#include "errors.hpp"
#include "solver.hpp"

namespace pfde::solver {

namespace {

constexpr std::uint64_t kBlock = 1 << 16;

}  // namespace

ScanState scan_begin(std::uint64_t limit, std::size_t witness_count) {
  if (witness_count == 0) fail(ErrorKind::InvalidArgument, "need at least one witness prime");
  ScanState st;
  st.limit = limit;
  // witnesses above the limit never divide n! for n <= limit
  for (std::uint64_t p = limit + 1; st.witnesses.size() < witness_count; ++p) {
    if (arith::is_prime(p) && p > 2) st.witnesses.push_back(p);
  }
  st.residues.assign(st.witnesses.size(), 1);
  return st;
}

void scan_advance(ScanState& st, std::uint64_t until, unsigned workers) {
  until = std::min(until, st.limit);
  const std::size_t w = st.witnesses.size();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(w)));
  while (st.next_n <= until) {
    const std::uint64_t lo = st.next_n;
    const std::uint64_t hi = std::min(until, lo + kBlock - 1);
    const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
    // pass[i][k]: n! + 1 is a square (or zero) mod witness i, for n = lo + k
    std::vector<std::vector<char>> pass(w, std::vector<char>(len));
    auto sieve = [&](std::size_t first, std::size_t step) {
      for (std::size_t i = first; i < w; i += step) {
        const std::uint64_t p = st.witnesses[i];
        std::uint64_t r = st.residues[i];
        for (std::size_t k = 0; k < len; ++k) {
          const std::uint64_t n = lo + k;
          if (n > 0) r = arith::mulmod(r, n % p, p);
          pass[i][k] = arith::jacobi((r + 1) % p, p) != -1;
        }
        st.residues[i] = r;
      }
    };
    if (workers == 1) {
      sieve(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < workers; ++t) pool.emplace_back(sieve, t, workers);
      for (auto& th : pool) th.join();
    }
    for (std::size_t k = 0; k < len; ++k) {
      const std::uint64_t n = lo + k;
      std::size_t i = 0;
      while (i < w && pass[i][k]) ++i;
      if (i == w) {
        st.candidates.push_back(n);
      } else if (st.rejections.size() < kRejectionSample) {
        st.rejections.emplace_back(n, st.witnesses[i]);
      }
    }
    st.next_n = hi + 1;
  }
}

ScanReport scan_finish(const ScanState& st) {
  ScanReport rep;
  rep.limit = st.limit;
  rep.witnesses = st.witnesses;
  rep.candidates = st.candidates;
  rep.rejections = st.rejections;
  for (std::uint64_t n : st.candidates) {
    const mpz_class v = arith::factorial(n) + 1;
    if (mpz_perfect_square_p(v.get_mpz_t())) rep.confirmed.push_back(n);
  }
  return rep;
}

ScanReport scan_brocard(std::uint64_t limit, std::size_t witness_count, unsigned workers) {
  ScanState st = scan_begin(limit, witness_count);
  scan_advance(st, limit, workers);
  return scan_finish(st);
}

nlohmann::json scan_report_to_json(const ScanReport& rep) {
  nlohmann::json rejections = nlohmann::json::array();
  for (const auto& [n, p] : rep.rejections) rejections.push_back({{"n", n}, {"witness", p}});
  return {{"schema", kSchemaVersion},
          {"kind", "scan"},
          {"limit", rep.limit},
          {"witnesses", rep.witnesses},
          {"candidates", rep.candidates},
          {"confirmed", rep.confirmed},
          {"rejections", rejections}};
}

}  // namespace pfde::solver
