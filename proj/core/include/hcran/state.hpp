#pragma once

#include <cstddef>
#include <vector>

namespace hcran {

/// Binary MBS-user-to-RRH selection x[z][m]. At most one RRH per MBS user and
/// at most one MBS user per RRH.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::size_t Z, std::size_t M) : Z_(Z), M_(M), x_(Z * M, 0) {}

  std::size_t Z() const { return Z_; }
  std::size_t M() const { return M_; }

  bool operator()(std::size_t z, std::size_t m) const { return x_[z * M_ + m] != 0; }
  void set(std::size_t z, std::size_t m, bool on) { x_[z * M_ + m] = on ? 1 : 0; }

  /// MBS users served by RRH m (the set Psi_m).
  std::vector<std::size_t> served_by(std::size_t m) const;
  /// RRH serving MBS user z, or M() when unserved.
  std::size_t rrh_of(std::size_t z) const;
  std::size_t pair_count() const;
  bool empty() const { return pair_count() == 0; }

  /// C10 and C11.
  bool is_one_to_one() const;

  bool operator==(const Assignment&) const = default;

 private:
  std::size_t Z_ = 0, M_ = 0;
  std::vector<unsigned char> x_;
};

/// Decision variables for one assignment hypothesis.
///
/// Q[m][z] and b[m][z] = W_z - w[m][z] are derived; Q is refreshed by
/// `refresh_mbs_power` and kept here so reports need not recompute it.
struct AllocationState {
  std::size_t K = 0, M = 0, Z = 0;
  std::vector<double> p;  ///< K x M, native-band power
  std::vector<double> q;  ///< K x M x Z, borrowed-band power
  std::vector<double> w;  ///< M x Z, bandwidth handed to the MBS user
  std::vector<double> Q;  ///< M x Z, power serving the MBS user

  AllocationState() = default;
  AllocationState(std::size_t K_, std::size_t M_, std::size_t Z_)
      : K(K_), M(M_), Z(Z_), p(K_ * M_, 0.0), q(K_ * M_ * Z_, 0.0),
        w(M_ * Z_, 0.0), Q(M_ * Z_, 0.0) {}

  double& p_at(std::size_t k, std::size_t m) { return p[k * M + m]; }
  double p_at(std::size_t k, std::size_t m) const { return p[k * M + m]; }
  double& q_at(std::size_t k, std::size_t m, std::size_t z) { return q[(k * M + m) * Z + z]; }
  double q_at(std::size_t k, std::size_t m, std::size_t z) const { return q[(k * M + m) * Z + z]; }
  double& w_at(std::size_t m, std::size_t z) { return w[m * Z + z]; }
  double w_at(std::size_t m, std::size_t z) const { return w[m * Z + z]; }
  double& Q_at(std::size_t m, std::size_t z) { return Q[m * Z + z]; }
  double Q_at(std::size_t m, std::size_t z) const { return Q[m * Z + z]; }

  bool operator==(const AllocationState&) const = default;
};

}  // namespace hcran
