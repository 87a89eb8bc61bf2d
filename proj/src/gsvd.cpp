#include "pggsvd/gsvd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pggsvd {

namespace {

// Singular values closer than this factor to the cutoff are treated as ambiguous.
constexpr double kAmbiguityBand = 100.0;

CMatrix stack(const CMatrix& top, const CMatrix& bottom) {
  CMatrix out(top.rows() + bottom.rows(), top.cols());
  if (top.rows() > 0) out.topRows(top.rows()) = top;
  if (bottom.rows() > 0) out.bottomRows(bottom.rows()) = bottom;
  return out;
}

// Orthonormal basis of the row space (first `rank` right singular vectors) and
// of the null space (the remaining ones).
struct RowSpaces {
  CMatrix row;
  CMatrix null;
};

RowSpaces row_spaces(const CMatrix& m, int rank) {
  const auto n = m.cols();
  if (m.rows() == 0 || rank == 0) {
    return {CMatrix(n, 0), CMatrix::Identity(n, n)};
  }
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const CMatrix& v = svd.matrixV();
  return {v.leftCols(rank), v.rightCols(n - rank)};
}

int rank_above(const CMatrix& m, double cutoff) {
  if (m.size() == 0) return 0;
  const RVector sv = Eigen::JacobiSVD<CMatrix>(m).singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff * kAmbiguityBand) {
      ++rank;
    } else if (sv(i) > cutoff / kAmbiguityBand) {
      throw RankAmbiguityError("singular value near the rank cutoff", sv(i), cutoff);
    }
  }
  return rank;
}

int concat_rank(const CMatrix& a, const CMatrix& b, double tol_rel) {
  if (a.cols() + b.cols() == 0) return 0;
  CMatrix m(a.rows(), a.cols() + b.cols());
  m << a, b;
  return numerical_rank(m, tol_rel);
}

}  // namespace

void WiretapChannel::validate() const {
  if (h_bob.cols() != h_eve.cols()) {
    std::ostringstream os;
    os << "channel column mismatch: H_ba has " << h_bob.cols() << " columns, H_ea has "
       << h_eve.cols();
    throw std::invalid_argument(os.str());
  }
  if (!(noise_bob > 0.0) || !(noise_eve > 0.0)) {
    throw std::invalid_argument("noise variances must be strictly positive");
  }
  if (!h_bob.allFinite() || !h_eve.allFinite()) {
    throw std::invalid_argument("channel matrices contain non-finite entries");
  }
}

double resolve_rank_tolerance(const WiretapChannel& channel, double tol) {
  if (tol < 0.0) throw std::invalid_argument("rank tolerance must be nonnegative");
  if (tol > 0.0) return tol;
  const int dim = std::max(channel.nt(), channel.nr() + channel.ne());
  return 1e-10 * std::max(dim, 1);
}

int numerical_rank(const CMatrix& m, double tol_rel) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax == 0.0) return 0;
  const double cutoff = tol_rel * smax;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double v = sv(i);
    if (v > cutoff / kAmbiguityBand && v <= cutoff * kAmbiguityBand) {
      std::ostringstream os;
      os << "rank ambiguous: singular value " << v << " lies within a factor "
         << kAmbiguityBand << " of the cutoff " << cutoff << "; adjust the rank tolerance";
      throw RankAmbiguityError(os.str(), v, cutoff);
    }
    if (v > cutoff) ++rank;
  }
  return rank;
}

SubspaceDims subspace_dims(const WiretapChannel& channel, double tol) {
  channel.validate();
  const double tol_rel = resolve_rank_tolerance(channel, tol);
  const int n1 = numerical_rank(channel.h_bob, tol_rel);
  const int n2 = numerical_rank(channel.h_eve, tol_rel);
  const int k = numerical_rank(stack(channel.h_bob, channel.h_eve), tol_rel);

  // r: what Bob still sees of the inputs Eve cannot see, rank(H_ba N_ea).
  // s: dim(A ∩ B) = dim A + dim B - dim(A + B) for the two row spaces.
  const RowSpaces bob = row_spaces(channel.h_bob, n1);
  const RowSpaces eve = row_spaces(channel.h_eve, n2);
  int r = 0;
  if (n1 > 0 && eve.null.cols() > 0) {
    const double scale = Eigen::JacobiSVD<CMatrix>(channel.h_bob).singularValues()(0);
    r = rank_above(channel.h_bob * eve.null, tol_rel * scale);
  }
  const int s = n1 + n2 - concat_rank(bob.row, eve.row, tol_rel);
  return {k, r, s};
}

GsvdDecomposition gsvd(const WiretapChannel& channel, double tol) {
  channel.validate();
  const double tol_rel = resolve_rank_tolerance(channel, tol);
  const int nt = channel.nt();
  const int nr = channel.nr();
  const int ne = channel.ne();

  const int n1 = numerical_rank(channel.h_bob, tol_rel);
  const int n2 = numerical_rank(channel.h_eve, tol_rel);
  const CMatrix stacked = stack(channel.h_bob, channel.h_eve);
  const int k = numerical_rank(stacked, tol_rel);

  GsvdDecomposition d;
  d.nt = nt;
  d.nr = nr;
  d.ne = ne;
  d.k = k;
  d.r = k - n2;
  d.s = n1 + n2 - k;
  if (d.r < 0 || d.s < 0 || k - n1 < 0) {
    std::ostringstream os;
    os << "inconsistent ranks (k=" << k << ", rank H_ba=" << n1 << ", rank H_ea=" << n2
       << "); adjust the rank tolerance";
    throw std::runtime_error(os.str());
  }
  const int eve_only = k - d.r - d.s;

  d.sigma_bob = CMatrix::Zero(nr, k);
  d.sigma_eve = CMatrix::Zero(ne, k);
  d.b = RVector::Zero(d.s);
  d.e = RVector::Zero(d.s);

  if (k == 0) {
    d.u_a = CMatrix::Identity(nt, nt);
    d.u_bob = CMatrix::Identity(nr, nr);
    d.u_eve = CMatrix::Identity(ne, ne);
    d.omega = CMatrix(0, 0);
    d.omega_inv = CMatrix(0, 0);
    return d;
  }

  // Rank-revealing factorization of the stack: stacked = Q * diag(sv) * Z_k^H.
  Eigen::JacobiSVD<CMatrix> outer(stacked, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const CMatrix q = outer.matrixU().leftCols(k);
  const CMatrix z = outer.matrixV();
  const RVector sv = outer.singularValues().head(k);

  // CS decomposition of the partitioned orthonormal factor Q = [Q1; Q2].
  const CMatrix q1 = q.topRows(nr);
  const CMatrix q2 = q.bottomRows(ne);
  CMatrix w = CMatrix::Identity(k, k);
  d.u_eve = CMatrix::Identity(ne, ne);
  if (ne > 0) {
    Eigen::JacobiSVD<CMatrix> inner(q2, Eigen::ComputeFullU | Eigen::ComputeFullV);
    w = inner.matrixV();
    d.u_eve = inner.matrixU();
  }
  const CMatrix qw1 = q1 * w;
  const CMatrix qw2 = q2 * w;

  for (int j = 0; j < eve_only; ++j) d.sigma_eve(j, j) = 1.0;
  for (int p = 0; p < d.s; ++p) {
    const int j = eve_only + p;
    const double bn = qw1.col(j).norm();
    const double en = qw2.col(j).norm();
    const double h = std::hypot(bn, en);
    d.b(p) = bn / h;
    d.e(p) = en / h;
    d.sigma_eve(j, j) = d.e(p);
  }

  // Bob's left factor: normalized columns of Q1 W for the shared and Bob-only
  // blocks, completed by an orthonormal complement on top.
  const int visible = d.r + d.s;
  CMatrix known(nr, visible);
  for (int p = 0; p < visible; ++p) {
    const int j = eve_only + p;
    known.col(p) = qw1.col(j) / qw1.col(j).norm();
    d.sigma_bob(nr - visible + p, j) = p < d.s ? cplx(d.b(p)) : cplx(1.0);
  }
  d.u_bob = CMatrix(nr, nr);
  if (nr > 0) {
    CMatrix complement = CMatrix::Identity(nr, nr);
    if (visible > 0) {
      Eigen::HouseholderQR<CMatrix> qr(known);
      complement = qr.householderQ();
    }
    d.u_bob.leftCols(nr - visible) = complement.rightCols(nr - visible);
    d.u_bob.rightCols(visible) = known;
  }

  // W^H diag(sv) = L Qt^H with L lower triangular; Omega^{-1} = L and the
  // unitary Qt is absorbed into U_a.
  const CMatrix m = w.adjoint() * sv.cast<cplx>().asDiagonal();
  Eigen::HouseholderQR<CMatrix> rq(m.adjoint());
  const CMatrix qt = rq.householderQ();
  const CMatrix rt = rq.matrixQR().triangularView<Eigen::Upper>();
  d.omega_inv = rt.adjoint();
  d.omega = d.omega_inv.triangularView<Eigen::Lower>().solve(CMatrix::Identity(k, k));

  d.u_a = CMatrix(nt, nt);
  d.u_a.leftCols(k) = z.leftCols(k) * qt;
  d.u_a.rightCols(nt - k) = z.rightCols(nt - k);
  return d;
}

std::pair<CMatrix, CMatrix> reconstruct(const GsvdDecomposition& d) {
  CMatrix right = CMatrix::Zero(d.k, d.nt);
  right.leftCols(d.k) = d.omega_inv;
  const CMatrix tail = right * d.u_a.adjoint();
  return {d.u_bob * d.sigma_bob * tail, d.u_eve * d.sigma_eve * tail};
}

}  // namespace pggsvd
