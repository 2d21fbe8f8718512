#include "nullsketch/sketch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "json.hpp"
#include "nullsketch/transforms.hpp"

namespace nullsketch {

namespace {

std::atomic<std::uint64_t> next_operator_id{1};

ComplexMatrix real_times_complex(const RealMatrix& g, const ComplexMatrix& x) {
  RealMatrix xr = x.real();
  RealMatrix xi = x.imag();
  ComplexMatrix out(g.rows(), x.cols());
  out.real() = g * xr;
  out.imag() = g * xi;
  return out;
}

template <typename Mat>
Mat spliced_in(const Mat& a, const Mat& col, Index pos) {
  Mat out(a.rows(), a.cols() + 1);
  out.leftCols(pos) = a.leftCols(pos);
  out.col(pos) = col.col(0);
  out.rightCols(a.cols() - pos) = a.rightCols(a.cols() - pos);
  return out;
}

template <typename Mat>
Mat spliced_out(const Mat& a, Index pos) {
  Mat out(a.rows(), a.cols() - 1);
  out.leftCols(pos) = a.leftCols(pos);
  out.rightCols(a.cols() - 1 - pos) = a.rightCols(a.cols() - 1 - pos);
  return out;
}

// sa + scale * g * row, promoting to complex when either side needs it.
Matrix rank_one_added(const Matrix& sa, const RealVector& g, const Matrix& row, double scale) {
  if (sa.is_real() && row.is_real()) {
    RealMatrix out = sa.real();
    out.noalias() += scale * (g * row.real());
    return Matrix(std::move(out));
  }
  ComplexMatrix out = sa.to_complex();
  out.noalias() += Complex(scale, 0.0) * (g.cast<Complex>() * row.to_complex());
  return Matrix(std::move(out));
}

Matrix column_times_row_subtracted(const Matrix& sa, const Matrix& col, const Matrix& row) {
  if (sa.is_real() && col.is_real() && row.is_real()) {
    RealMatrix out = sa.real();
    out.noalias() -= col.real() * row.real();
    return Matrix(std::move(out));
  }
  ComplexMatrix out = sa.to_complex();
  out.noalias() -= col.to_complex() * row.to_complex();
  return Matrix(std::move(out));
}

void require_row_vector(const Matrix& row, Index n, const char* what) {
  if (row.rows() != 1 || row.cols() != n) {
    throw std::invalid_argument(std::string(what) + ": expected a 1 x " + std::to_string(n) +
                                " row, got " + std::to_string(row.rows()) + " x " +
                                std::to_string(row.cols()));
  }
}

void require_same_operator(const SketchedMatrix& sa, const SketchOperator& S) {
  if (sa.operator_id != S.id()) {
    throw std::invalid_argument("sketched matrix does not belong to this operator");
  }
}

}  // namespace

std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::gaussian: return "gaussian";
    case SketchKind::srft: return "srft";
    case SketchKind::srdct: return "srdct";
  }
  throw std::logic_error("unknown sketch kind");
}

SketchKind sketch_kind_from_string(const std::string& name) {
  if (name == "gaussian") return SketchKind::gaussian;
  if (name == "srft") return SketchKind::srft;
  if (name == "srdct") return SketchKind::srdct;
  throw std::invalid_argument("unknown sketch kind: " + name);
}

Index default_sketch_size(SketchKind kind, Index n) {
  return kind == SketchKind::gaussian ? 4 * n : 2 * n;
}

SketchOperator SketchOperator::draw(SketchKind kind, Index s, Index m, std::uint64_t seed) {
  if (s < 1 || m < 1) throw std::invalid_argument("sketch draw: s and m must be positive");
  if (kind != SketchKind::gaussian && s > m) {
    throw std::invalid_argument("sketch draw: subsampled transforms need s <= m");
  }
  SketchOperator op;
  op.kind_ = kind;
  op.s_ = s;
  op.m_ = m;
  op.seed_ = seed;
  op.id_ = next_operator_id.fetch_add(1);
  op.update_stream_ = PhiloxStream(seed, 1);
  op.appended_.resize(s, 0);
  PhiloxStream base(seed, 0);
  if (kind == SketchKind::gaussian) {
    op.gauss_.resize(s, m);
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < s; ++i) op.gauss_(i, j) = base.next_gaussian();
    }
  } else {
    op.signs_.resize(m);
    for (Index i = 0; i < m; ++i) op.signs_(i) = base.next_sign();
    op.sample_idx_ = sample_without_replacement(m, s, base);
  }
  return op;
}

Matrix SketchOperator::sketch_vector(Index j) const {
  const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(s_));
  if (j >= m_) {
    RealMatrix col = inv_sqrt_s * appended_.col(j - m_);
    if (kind_ == SketchKind::srft) return Matrix(ComplexMatrix(col.cast<Complex>()));
    return Matrix(std::move(col));
  }
  switch (kind_) {
    case SketchKind::gaussian: {
      RealMatrix col = inv_sqrt_s * gauss_.col(j);
      return Matrix(std::move(col));
    }
    case SketchKind::srft: {
      const double scale = std::sqrt(static_cast<double>(m_) / static_cast<double>(s_));
      ComplexMatrix col(s_, 1);
      for (Index i = 0; i < s_; ++i) {
        col(i, 0) = scale * signs_(j) * idft_unitary_entry(m_, sample_idx_[i], j);
      }
      return Matrix(std::move(col));
    }
    case SketchKind::srdct: {
      const double scale = std::sqrt(static_cast<double>(m_) / static_cast<double>(s_));
      RealMatrix col(s_, 1);
      for (Index i = 0; i < s_; ++i) {
        col(i, 0) = scale * signs_(j) * dct3_unitary_entry(m_, sample_idx_[i], j);
      }
      return Matrix(std::move(col));
    }
  }
  throw std::logic_error("unknown sketch kind");
}

Matrix SketchOperator::dense() const {
  const Index me = m_effective();
  if (kind_ == SketchKind::srft) {
    ComplexMatrix d(s_, me);
    for (Index j = 0; j < me; ++j) d.col(j) = sketch_vector(j).cplx().col(0);
    return Matrix(std::move(d));
  }
  RealMatrix d(s_, me);
  for (Index j = 0; j < me; ++j) d.col(j) = sketch_vector(j).real().col(0);
  return Matrix(std::move(d));
}

void SketchOperator::zero_row(Index j) {
  auto it = std::lower_bound(zeroed_.begin(), zeroed_.end(), j);
  zeroed_.insert(it, j);
  if (j >= m_) {
    appended_.col(j - m_).setZero();
  } else if (kind_ == SketchKind::gaussian) {
    gauss_.col(j).setZero();
  }
}

SketchedMatrix apply(const SketchOperator& S, const Matrix& A) {
  if (A.rows() != S.m_effective()) {
    throw std::invalid_argument("sketch apply: matrix has " + std::to_string(A.rows()) +
                                " rows, operator expects " + std::to_string(S.m_effective()));
  }
  const Index p = S.appended_count();
  const Index n = A.cols();
  const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(S.s_));
  const double scale = std::sqrt(static_cast<double>(S.m_) / static_cast<double>(S.s_));

  switch (S.kind_) {
    case SketchKind::gaussian: {
      if (A.is_real()) {
        RealMatrix out = inv_sqrt_s * (S.gauss_ * A.real().topRows(S.m_));
        if (p > 0) out.noalias() += inv_sqrt_s * (S.appended_ * A.real().bottomRows(p));
        return {Matrix(std::move(out)), S.id()};
      }
      ComplexMatrix out = real_times_complex(S.gauss_, A.cplx().topRows(S.m_));
      if (p > 0) out += real_times_complex(S.appended_, A.cplx().bottomRows(p));
      out *= inv_sqrt_s;
      return {Matrix(std::move(out)), S.id()};
    }
    case SketchKind::srft: {
      ComplexMatrix top = A.to_complex().topRows(S.m_);
      for (Index i = 0; i < S.m_; ++i) top.row(i) *= S.signs_(i);
      idft_unitary_columns(top);
      ComplexMatrix out(S.s_, n);
      for (Index i = 0; i < S.s_; ++i) out.row(i) = scale * top.row(S.sample_idx_[i]);
      if (p > 0) {
        ComplexMatrix bottom = A.to_complex().bottomRows(p);
        out += inv_sqrt_s * real_times_complex(S.appended_, bottom);
      }
      return {Matrix(std::move(out)), S.id()};
    }
    case SketchKind::srdct: {
      if (!A.is_real()) {
        throw std::invalid_argument("srdct sketch is defined for real matrices only");
      }
      RealMatrix top = A.real().topRows(S.m_);
      for (Index i = 0; i < S.m_; ++i) top.row(i) *= S.signs_(i);
      dct3_unitary_columns(top);
      RealMatrix out(S.s_, n);
      for (Index i = 0; i < S.s_; ++i) out.row(i) = scale * top.row(S.sample_idx_[i]);
      if (p > 0) out.noalias() += inv_sqrt_s * (S.appended_ * A.real().bottomRows(p));
      return {Matrix(std::move(out)), S.id()};
    }
  }
  throw std::logic_error("unknown sketch kind");
}

SketchedMatrix update_column(const SketchedMatrix& sa, const SketchOperator& S,
                             const Matrix& a_col, Index position) {
  require_same_operator(sa, S);
  if (a_col.cols() != 1 || a_col.rows() != S.m_effective()) {
    throw std::invalid_argument("update_column: column must be " +
                                std::to_string(S.m_effective()) + " x 1");
  }
  if (position < 0 || position > sa.data.cols()) {
    throw std::out_of_range("update_column: position out of range");
  }
  Matrix col = a_col;
  if (!S.zeroed_rows().empty()) {
    if (col.is_real()) {
      for (Index j : S.zeroed_rows()) col.real()(j, 0) = 0.0;
    } else {
      for (Index j : S.zeroed_rows()) col.cplx()(j, 0) = Complex(0.0, 0.0);
    }
  }
  Matrix sk = apply(S, col).data;
  if (sa.data.is_real() && sk.is_real()) {
    return {Matrix(spliced_in(sa.data.real(), sk.real(), position)), sa.operator_id};
  }
  return {Matrix(spliced_in(sa.data.to_complex(), sk.to_complex(), position)), sa.operator_id};
}

SketchedMatrix downdate_column(const SketchedMatrix& sa, Index position) {
  if (position < 0 || position >= sa.data.cols()) {
    throw std::out_of_range("downdate_column: position out of range");
  }
  Matrix out = sa.data.is_real() ? Matrix(spliced_out(sa.data.real(), position))
                                 : Matrix(spliced_out(sa.data.cplx(), position));
  return {std::move(out), sa.operator_id};
}

SketchedMatrix update_row(const SketchedMatrix& sa, SketchOperator& S, const Matrix& a_row) {
  require_same_operator(sa, S);
  require_row_vector(a_row, sa.data.cols(), "update_row");
  if (S.kind_ == SketchKind::srdct && !a_row.is_real()) {
    throw std::invalid_argument("update_row: srdct sketch carries real data only");
  }
  RealVector g(S.s_);
  for (Index i = 0; i < S.s_; ++i) g(i) = S.update_stream_.next_gaussian();
  const Index p = S.appended_.cols();
  S.appended_.conservativeResize(S.s_, p + 1);
  S.appended_.col(p) = g;
  const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(S.s_));
  return {rank_one_added(sa.data, g, a_row, inv_sqrt_s), sa.operator_id};
}

SketchedMatrix downdate_row(const SketchedMatrix& sa, SketchOperator& S, Index j,
                            const Matrix& a_row_j) {
  require_same_operator(sa, S);
  require_row_vector(a_row_j, sa.data.cols(), "downdate_row");
  if (j < 0 || j >= S.m_effective()) {
    throw std::out_of_range("downdate_row: row index out of range");
  }
  if (std::binary_search(S.zeroed_.begin(), S.zeroed_.end(), j)) {
    throw std::invalid_argument("downdate_row: row " + std::to_string(j) + " already removed");
  }
  Matrix ej = S.sketch_vector(j);
  S.zero_row(j);
  Matrix out = column_times_row_subtracted(sa.data, ej, a_row_j);
  if (S.live_rows() < 2 * S.s_) {
    std::cerr << "nullsketch: warning: sketch operator down to " << S.live_rows()
              << " live rows (s = " << S.s_ << "); quality degrades as rows are removed\n";
  }
  return {std::move(out), sa.operator_id};
}

std::string SketchOperator::descriptor() const {
  nlohmann::json j;
  j["format"] = 1;
  j["kind"] = to_string(kind_);
  j["s"] = s_;
  j["m"] = m_;
  j["seed"] = seed_;
  j["appended"] = appended_.cols();
  j["zeroed_rows"] = zeroed_;
  return j.dump();
}

SketchOperator SketchOperator::from_descriptor(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.value("format", 0) != 1) {
    throw std::invalid_argument("sketch descriptor: unsupported format");
  }
  SketchOperator op = draw(sketch_kind_from_string(j.at("kind").get<std::string>()),
                           j.at("s").get<Index>(), j.at("m").get<Index>(),
                           j.at("seed").get<std::uint64_t>());
  const Index appended = j.at("appended").get<Index>();
  if (appended < 0) throw std::invalid_argument("sketch descriptor: bad appended count");
  op.appended_.resize(op.s_, appended);
  for (Index c = 0; c < appended; ++c) {
    for (Index i = 0; i < op.s_; ++i) op.appended_(i, c) = op.update_stream_.next_gaussian();
  }
  for (Index z : j.at("zeroed_rows").get<std::vector<Index>>()) {
    if (z < 0 || z >= op.m_effective() ||
        std::binary_search(op.zeroed_.begin(), op.zeroed_.end(), z)) {
      throw std::invalid_argument("sketch descriptor: bad zeroed row " + std::to_string(z));
    }
    op.zero_row(z);
  }
  return op;
}

}  // namespace nullsketch
