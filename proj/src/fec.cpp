#include "obsim/fec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace obsim {

namespace {

using Words = std::vector<std::uint64_t>;

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

bool test_bit(const Words& w, std::size_t i) { return (w[i / 64] >> (i % 64)) & 1U; }

void set_bit(Words& w, std::size_t i) { w[i / 64] |= std::uint64_t{1} << (i % 64); }

struct Echelon {
  std::size_t rank = 0;
  std::vector<Words> rows;                 // reduced rows, first `rank` are pivot rows
  std::vector<std::uint32_t> pivot_cols;   // pivot column of each reduced row
};

// Reduced row-echelon form over GF(2), pivot columns searched from the last
// column down to the first.
Echelon reduce(std::size_t n, const std::vector<std::vector<std::uint32_t>>& rows) {
  Echelon e;
  const std::size_t words = word_count(n);
  e.rows.assign(rows.size(), Words(words, 0));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (auto c : rows[r]) e.rows[r][c / 64] ^= std::uint64_t{1} << (c % 64);

  std::size_t pivot_row = 0;
  for (std::size_t step = 0; step < n && pivot_row < e.rows.size(); ++step) {
    const std::size_t col = n - 1 - step;
    std::size_t found = pivot_row;
    while (found < e.rows.size() && !test_bit(e.rows[found], col)) ++found;
    if (found == e.rows.size()) continue;
    std::swap(e.rows[pivot_row], e.rows[found]);
    const Words& p = e.rows[pivot_row];
    for (std::size_t r = 0; r < e.rows.size(); ++r) {
      if (r == pivot_row || !test_bit(e.rows[r], col)) continue;
      for (std::size_t w = 0; w < words; ++w) e.rows[r][w] ^= p[w];
    }
    e.pivot_cols.push_back(static_cast<std::uint32_t>(col));
    ++pivot_row;
  }
  e.rank = pivot_row;
  return e;
}

std::vector<std::string> next_content_line(std::istream& in, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) tokens.push_back(t);
    if (!tokens.empty()) return tokens;
  }
  throw AlistError(std::string("alist truncated while reading ") + what);
}

std::vector<std::size_t> to_numbers(const std::vector<std::string>& tokens, const char* what) {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &pos);
    } catch (const std::exception&) {
      throw AlistError(std::string("non-numeric token '") + t + "' in " + what);
    }
    if (pos != t.size() || v < 0) throw AlistError(std::string("invalid token '") + t + "' in " + what);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// Reads one adjacency line: non-zero 1-based indices, zeros are padding.
std::vector<std::uint32_t> read_index_line(std::istream& in, std::size_t degree, std::size_t bound,
                                           const char* what) {
  auto nums = to_numbers(next_content_line(in, what), what);
  std::vector<std::uint32_t> idx;
  for (auto v : nums) {
    if (v == 0) continue;
    if (v > bound) throw AlistError(std::string("index out of range in ") + what);
    idx.push_back(static_cast<std::uint32_t>(v - 1));
  }
  if (idx.size() != degree) throw AlistError(std::string("degree mismatch in ") + what);
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw AlistError(std::string("duplicate index in ") + what);
  return idx;
}

}  // namespace

LdpcCode::LdpcCode(std::size_t n_code, std::vector<std::vector<std::uint32_t>> rows)
    : n_(n_code), rows_(std::move(rows)), cols_(n_code) {
  if (n_ == 0) throw std::invalid_argument("LDPC code length must be positive");
  check_offsets_.push_back(0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    auto& row = rows_[r];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (auto c : row) {
      if (c >= n_) throw std::invalid_argument("parity-check column index out of range");
      cols_[c].push_back(static_cast<std::uint32_t>(r));
      edge_var_.push_back(c);
    }
    check_offsets_.push_back(static_cast<std::uint32_t>(edge_var_.size()));
  }

  std::vector<std::vector<std::uint32_t>> per_var(n_);
  for (std::size_t e = 0; e < edge_var_.size(); ++e) per_var[edge_var_[e]].push_back(static_cast<std::uint32_t>(e));
  var_offsets_.push_back(0);
  for (const auto& edges : per_var) {
    var_edges_.insert(var_edges_.end(), edges.begin(), edges.end());
    var_offsets_.push_back(static_cast<std::uint32_t>(var_edges_.size()));
  }

  rank_ = reduce(n_, rows_).rank;
}

Bits LdpcCode::encode(std::span<const std::uint8_t> info) const {
  if (!encoder_ready_) throw std::logic_error("encoder not derived; call derive_encoder first");
  if (info.size() != k_info()) throw std::invalid_argument("info word length does not match k_info");
  Words packed(word_count(k_info()), 0);
  for (std::size_t t = 0; t < info.size(); ++t)
    if (info[t]) set_bit(packed, t);

  Bits codeword(n_, 0);
  for (std::size_t t = 0; t < info_positions_.size(); ++t) codeword[info_positions_[t]] = info[t] & 1U;
  for (std::size_t j = 0; j < pivot_positions_.size(); ++j) {
    unsigned parity = 0;
    const auto& row = parity_rows_[j];
    for (std::size_t w = 0; w < row.size(); ++w) parity ^= std::popcount(row[w] & packed[w]) & 1U;
    codeword[pivot_positions_[j]] = static_cast<std::uint8_t>(parity);
  }
  return codeword;
}

Bits LdpcCode::extract_info(std::span<const std::uint8_t> codeword) const {
  if (codeword.size() != n_) throw std::invalid_argument("codeword length does not match n_code");
  Bits info;
  info.reserve(info_positions_.size());
  for (auto p : info_positions_) info.push_back(codeword[p]);
  return info;
}

bool LdpcCode::satisfies_checks(std::span<const std::uint8_t> codeword) const {
  if (codeword.size() != n_) return false;
  for (const auto& row : rows_) {
    unsigned parity = 0;
    for (auto c : row) parity ^= codeword[c] & 1U;
    if (parity) return false;
  }
  return true;
}

LdpcCode parse_alist(std::istream& in) {
  auto header = to_numbers(next_content_line(in, "header"), "header");
  if (header.size() != 2 || header[0] == 0 || header[1] == 0) throw AlistError("malformed alist header 'n m'");
  const std::size_t n = header[0];
  const std::size_t m = header[1];

  auto maxdeg = to_numbers(next_content_line(in, "max degrees"), "max degrees");
  if (maxdeg.size() != 2) throw AlistError("malformed max-degree line");

  auto col_deg = to_numbers(next_content_line(in, "column degrees"), "column degrees");
  auto row_deg = to_numbers(next_content_line(in, "row degrees"), "row degrees");
  if (col_deg.size() != n) throw AlistError("column degree list has wrong length");
  if (row_deg.size() != m) throw AlistError("row degree list has wrong length");
  for (auto d : col_deg)
    if (d > maxdeg[0]) throw AlistError("column degree exceeds declared maximum");
  for (auto d : row_deg)
    if (d > maxdeg[1]) throw AlistError("row degree exceeds declared maximum");

  std::set<std::pair<std::uint32_t, std::uint32_t>> from_cols;
  for (std::size_t c = 0; c < n; ++c)
    for (auto r : read_index_line(in, col_deg[c], m, "column list"))
      from_cols.emplace(r, static_cast<std::uint32_t>(c));

  std::vector<std::vector<std::uint32_t>> rows(m);
  std::set<std::pair<std::uint32_t, std::uint32_t>> from_rows;
  for (std::size_t r = 0; r < m; ++r) {
    rows[r] = read_index_line(in, row_deg[r], n, "row list");
    for (auto c : rows[r]) from_rows.emplace(static_cast<std::uint32_t>(r), c);
  }
  if (from_cols != from_rows) throw AlistError("row and column lists disagree");
  return LdpcCode(n, std::move(rows));
}

LdpcCode parse_alist_text(const std::string& text) {
  std::istringstream in(text);
  return parse_alist(in);
}

LdpcCode load_alist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw AlistError("cannot open alist file " + path.string());
  return parse_alist(in);
}

LdpcCode derive_encoder(LdpcCode code) {
  const std::size_t n = code.n_;
  Echelon e = reduce(n, code.rows_);
  code.rank_ = e.rank;

  std::vector<bool> is_pivot(n, false);
  for (auto c : e.pivot_cols) is_pivot[c] = true;
  code.info_positions_.clear();
  std::vector<std::size_t> info_index(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    info_index[c] = code.info_positions_.size();
    code.info_positions_.push_back(static_cast<std::uint32_t>(c));
  }

  // Row j of the reduced matrix reads: c[pivot_j] + sum_{info c} R[j][c] c = 0.
  const std::size_t k = code.info_positions_.size();
  code.pivot_positions_ = e.pivot_cols;
  code.parity_rows_.assign(e.rank, Words(word_count(k), 0));
  for (std::size_t j = 0; j < e.rank; ++j)
    for (std::size_t c = 0; c < n; ++c)
      if (!is_pivot[c] && test_bit(e.rows[j], c)) set_bit(code.parity_rows_[j], info_index[c]);
  code.encoder_ready_ = true;
  return code;
}

DecodeResult sum_product_decode(const LdpcCode& code, std::span<const double> llrs, std::size_t max_iters) {
  if (llrs.size() != code.n_code()) throw std::invalid_argument("LLR length does not match n_code");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");

  const auto& check_off = code.check_offsets();
  const auto& edge_var = code.edge_var();
  const auto& var_off = code.var_offsets();
  const auto& var_edges = code.var_edges();
  const std::size_t n = code.n_code();
  const std::size_t edges = edge_var.size();

  auto clamp = [](double x) { return std::clamp(x, -kLlrClamp, kLlrClamp); };
  const double max_tanh = std::tanh(kLlrClamp / 2.0);

  std::vector<double> channel(n);
  for (std::size_t v = 0; v < n; ++v) channel[v] = clamp(llrs[v]);

  std::vector<double> v2c(edges), c2v(edges), t(edges), prefix;
  for (std::size_t e = 0; e < edges; ++e) v2c[e] = channel[edge_var[e]];

  std::vector<double> posterior(n);
  Bits hard(n);
  DecodeResult result;

  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    for (std::size_t c = 0; c + 1 < check_off.size(); ++c) {
      const std::size_t begin = check_off[c], end = check_off[c + 1];
      const std::size_t deg = end - begin;
      if (deg == 0) continue;
      prefix.assign(deg + 1, 1.0);
      for (std::size_t j = 0; j < deg; ++j) {
        t[begin + j] = std::tanh(0.5 * v2c[begin + j]);
        prefix[j + 1] = prefix[j] * t[begin + j];
      }
      double suffix = 1.0;
      for (std::size_t j = deg; j-- > 0;) {
        const double p = std::clamp(prefix[j] * suffix, -max_tanh, max_tanh);
        c2v[begin + j] = 2.0 * std::atanh(p);
        suffix *= t[begin + j];
      }
    }

    bool undecided = false;
    for (std::size_t v = 0; v < n; ++v) {
      double total = channel[v];
      for (std::size_t i = var_off[v]; i < var_off[v + 1]; ++i) total += c2v[var_edges[i]];
      posterior[v] = total;
      hard[v] = total < 0.0 ? 1 : 0;
      undecided |= (total == 0.0);
      for (std::size_t i = var_off[v]; i < var_off[v + 1]; ++i) {
        const auto e = var_edges[i];
        v2c[e] = clamp(total - c2v[e]);
      }
    }

    result.iterations_used = iter;
    if (!undecided && code.satisfies_checks(hard)) {
      result.converged = true;
      break;
    }
  }
  result.bits = code.has_encoder() ? code.extract_info(hard) : hard;
  return result;
}

PackedStream pack_frames_into_codewords(std::span<const Frame> frames, std::size_t k_info) {
  BlockPacker packer(k_info);
  for (const auto& frame : frames)
    for (const auto& payload : frame.payloads) packer.push(payload.bits());
  PackedStream out;
  out.pad_bits = packer.finish();
  out.blocks = packer.take_blocks();
  return out;
}

Bits unpack_blocks(const PackedStream& stream) {
  Bits bits;
  for (const auto& b : stream.blocks) bits.insert(bits.end(), b.begin(), b.end());
  if (stream.pad_bits > bits.size()) throw std::invalid_argument("pad length exceeds stream length");
  bits.resize(bits.size() - stream.pad_bits);
  return bits;
}

BlockPacker::BlockPacker(std::size_t block_bits) : block_bits_(block_bits) {
  if (block_bits_ == 0) throw std::invalid_argument("block size must be positive");
  pending_.reserve(block_bits_);
}

void BlockPacker::push(std::span<const std::uint8_t> bits) {
  for (auto b : bits) {
    pending_.push_back(b);
    if (pending_.size() == block_bits_) {
      ready_.push_back(std::move(pending_));
      pending_.clear();
      pending_.reserve(block_bits_);
    }
  }
}

std::vector<Bits> BlockPacker::take_blocks() { return std::exchange(ready_, {}); }

std::size_t BlockPacker::finish() {
  if (pending_.empty()) return 0;
  const std::size_t pad = block_bits_ - pending_.size();
  pending_.resize(block_bits_, 0);
  ready_.push_back(std::move(pending_));
  pending_.clear();
  return pad;
}

}  // namespace obsim
