#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "obsim/bitunit.hpp"
#include "obsim/falling_storage.hpp"
#include "obsim/phy.hpp"

namespace obsim {

class AlistError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary LDPC code defined by a sparse parity-check matrix H (m x n).
///
/// k_info is n minus the GF(2) rank of H, computed at parse time. The
/// systematic encoder is populated by derive_encoder(): info bits occupy the
/// non-pivot columns of a reduced row-echelon form of H (pivots are searched
/// from the last column backwards, so for the usual [info | parity] layouts
/// the info bits come first).
class LdpcCode {
 public:
  LdpcCode(std::size_t n_code, std::vector<std::vector<std::uint32_t>> rows);

  std::size_t n_code() const noexcept { return n_; }
  std::size_t m_checks() const noexcept { return rows_.size(); }
  std::size_t k_info() const noexcept { return n_ - rank_; }
  std::size_t rank() const noexcept { return rank_; }
  std::size_t edge_count() const noexcept { return edge_var_.size(); }
  CodeRate rate() const noexcept { return {k_info(), n_}; }

  const std::vector<std::vector<std::uint32_t>>& rows() const noexcept { return rows_; }
  const std::vector<std::vector<std::uint32_t>>& cols() const noexcept { return cols_; }

  bool has_encoder() const noexcept { return encoder_ready_; }

  /// Systematic codeword for `info` (k_info bits). Requires derive_encoder().
  Bits encode(std::span<const std::uint8_t> info) const;

  /// Reads the info positions of a codeword.
  Bits extract_info(std::span<const std::uint8_t> codeword) const;

  /// H * c^T == 0 over GF(2).
  bool satisfies_checks(std::span<const std::uint8_t> codeword) const;

  const std::vector<std::uint32_t>& info_positions() const noexcept { return info_positions_; }

  // Tanner-graph adjacency, edges numbered row by row.
  const std::vector<std::uint32_t>& check_offsets() const noexcept { return check_offsets_; }
  const std::vector<std::uint32_t>& edge_var() const noexcept { return edge_var_; }
  const std::vector<std::uint32_t>& var_offsets() const noexcept { return var_offsets_; }
  const std::vector<std::uint32_t>& var_edges() const noexcept { return var_edges_; }

 private:
  friend LdpcCode derive_encoder(LdpcCode code);

  std::size_t n_;
  std::vector<std::vector<std::uint32_t>> rows_;
  std::vector<std::vector<std::uint32_t>> cols_;
  std::size_t rank_ = 0;

  std::vector<std::uint32_t> check_offsets_;
  std::vector<std::uint32_t> edge_var_;
  std::vector<std::uint32_t> var_offsets_;
  std::vector<std::uint32_t> var_edges_;

  std::vector<std::uint32_t> info_positions_;
  std::vector<std::uint32_t> pivot_positions_;
  std::vector<std::vector<std::uint64_t>> parity_rows_;  // over info index
  bool encoder_ready_ = false;
};

/// Parses the alist format: "n m", "max_col_deg max_row_deg", column
/// degrees, row degrees, then n column lines and m row lines of 1-based
/// indices. Zero entries are padding. Throws AlistError.
LdpcCode parse_alist(std::istream& in);
LdpcCode parse_alist_text(const std::string& text);
LdpcCode load_alist(const std::filesystem::path& path);

/// Populates the systematic encoder by Gaussian elimination over GF(2).
LdpcCode derive_encoder(LdpcCode code);

struct DecodeResult {
  Bits bits;  ///< k_info decoded information bits
  bool converged = false;
  std::size_t iterations_used = 0;
};

/// Magnitude bound applied to channel and check-to-variable LLRs inside the
/// decoder, so tanh/atanh never saturate.
inline constexpr double kLlrClamp = 30.0;

/// Flooding-schedule sum-product decoding with tanh-rule check updates.
/// Stops after the first iteration whose hard decision satisfies every check.
/// A posterior LLR of exactly zero is an undecided bit and blocks convergence.
DecodeResult sum_product_decode(const LdpcCode& code, std::span<const double> llrs, std::size_t max_iters);

inline Bits rate1_passthrough(Bits bits) { return bits; }

/// Frame payload bits concatenated in slot and frame order, cut into
/// k_info-bit info blocks; the final block is zero-filled and `pad_bits`
/// records how many bits were appended.
struct PackedStream {
  std::vector<Bits> blocks;
  std::size_t pad_bits = 0;
};

PackedStream pack_frames_into_codewords(std::span<const Frame> frames, std::size_t k_info);

/// Inverse of pack: concatenated blocks minus the trailing pad.
Bits unpack_blocks(const PackedStream& stream);

/// Incremental packer used by streaming pipelines.
class BlockPacker {
 public:
  explicit BlockPacker(std::size_t block_bits);

  void push(std::span<const std::uint8_t> bits);
  /// Completed blocks since the last call.
  std::vector<Bits> take_blocks();
  /// Zero-fills the partial block, if any; returns the number of pad bits.
  std::size_t finish();

 private:
  std::size_t block_bits_;
  Bits pending_;
  std::vector<Bits> ready_;
};

}  // namespace obsim
