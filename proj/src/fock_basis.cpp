#include <sstream>

#include "bogolib/fock.hpp"

namespace bogolib {

std::uint64_t FockBasis::count(Index m_exc, Index M) {
  // C(M + m, m) computed incrementally; exact for the sizes used here
  std::uint64_t c = 1;
  for (Index j = 1; j <= m_exc; ++j) c = c * static_cast<std::uint64_t>(M + j) / static_cast<std::uint64_t>(j);
  return c;
}

FockBasis::FockBasis(Index m_exc, Index M, std::optional<FockSector> sector)
    : m_(m_exc), M_(M), sector_(std::move(sector)) {
  if (m_exc < 1) throw ContractError("FockBasis: need at least one mode");
  if (M < 0 || M > 255) throw ContractError("FockBasis: cutoff must lie in 0..255");
  std::uint64_t full = count(m_exc, M);
  if (full > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max()) / 2) {
    std::ostringstream os;
    os << "FockBasis: " << full << " states exceed the supported size";
    throw ContractError(os.str());
  }
  if (sector_ && static_cast<Index>(sector_->mask.size()) != m_exc)
    throw ContractError("FockBasis: sector mask size does not match the mode count");
  full_size_ = static_cast<Index>(full);

  binom_.assign(static_cast<std::size_t>(m_ + 1), std::vector<std::uint64_t>(static_cast<std::size_t>(M_ + 1)));
  for (Index r = 0; r <= m_; ++r)
    for (Index R = 0; R <= M_; ++R) binom_[r][R] = count(r, R);

  occ_.assign(static_cast<std::size_t>(full_size_ * m_), 0);
  total_.assign(static_cast<std::size_t>(full_size_), 0);
  // lexicographic enumeration, n_1 most significant
  std::vector<int> cur(static_cast<std::size_t>(m_), 0);
  Index f = 0;
  int sum = 0;
  for (;;) {
    for (Index i = 0; i < m_; ++i) occ_[static_cast<std::size_t>(f * m_ + i)] = static_cast<std::uint8_t>(cur[i]);
    total_[static_cast<std::size_t>(f)] = static_cast<std::uint8_t>(sum);
    ++f;
    // increment the last position that can grow, reset everything after it
    Index pos = m_ - 1;
    while (pos >= 0) {
      if (sum < M_) {
        ++cur[pos];
        ++sum;
        break;
      }
      // cannot grow here: clear and move left
      sum -= cur[pos];
      cur[pos] = 0;
      --pos;
      if (pos >= 0 && sum < M_) {
        ++cur[pos];
        ++sum;
        break;
      }
    }
    if (pos < 0) break;
  }
  if (f != full_size_) throw Error("FockBasis: enumeration count mismatch");

  create_.assign(static_cast<std::size_t>(m_ * full_size_), -1);
  annihilate_.assign(static_cast<std::size_t>(m_ * full_size_), -1);
  std::vector<int> occ(static_cast<std::size_t>(m_));
  for (Index s = 0; s < full_size_; ++s) {
    for (Index i = 0; i < m_; ++i) occ[i] = occupation(s, i);
    for (Index i = 0; i < m_; ++i) {
      if (total(s) < M_) {
        ++occ[i];
        create_[static_cast<std::size_t>(i * full_size_ + s)] = static_cast<std::int32_t>(full_index(occ));
        --occ[i];
      }
      if (occ[i] > 0) {
        --occ[i];
        annihilate_[static_cast<std::size_t>(i * full_size_ + s)] = static_cast<std::int32_t>(full_index(occ));
        ++occ[i];
      }
    }
  }

  if (sector_) {
    full_to_compact_.assign(static_cast<std::size_t>(full_size_), -1);
    for (Index s = 0; s < full_size_; ++s) {
      int p = 0;
      for (Index i = 0; i < m_; ++i)
        if (sector_->mask[static_cast<std::size_t>(i)]) p += occupation(s, i);
      if ((p & 1) == (sector_->parity & 1)) {
        full_to_compact_[static_cast<std::size_t>(s)] = static_cast<std::int32_t>(compact_to_full_.size());
        compact_to_full_.push_back(static_cast<std::int32_t>(s));
      }
    }
  } else {
    compact_to_full_.resize(static_cast<std::size_t>(full_size_));
    for (Index s = 0; s < full_size_; ++s) compact_to_full_[static_cast<std::size_t>(s)] = static_cast<std::int32_t>(s);
  }
}

std::vector<int> FockBasis::occupations(Index f) const {
  std::vector<int> o(static_cast<std::size_t>(m_));
  for (Index i = 0; i < m_; ++i) o[static_cast<std::size_t>(i)] = occupation(f, i);
  return o;
}

Index FockBasis::full_index(const std::vector<int>& occ) const {
  if (static_cast<Index>(occ.size()) != m_) throw ContractError("FockBasis: occupation size mismatch");
  std::uint64_t rank = 0;
  Index remaining = M_;
  for (Index i = 0; i < m_; ++i) {
    int ni = occ[static_cast<std::size_t>(i)];
    if (ni < 0 || ni > remaining) return -1;
    const auto& row = binom_[static_cast<std::size_t>(m_ - 1 - i)];
    for (int v = 0; v < ni; ++v) rank += row[static_cast<std::size_t>(remaining - v)];
    remaining -= ni;
  }
  return static_cast<Index>(rank);
}

Index FockBasis::index_of(const std::vector<int>& occ) const {
  Index f = full_index(occ);
  return f < 0 ? -1 : compact(f);
}

}  // namespace bogolib
