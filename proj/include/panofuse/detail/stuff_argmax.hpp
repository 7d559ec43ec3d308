// Copyright 2026 The Panofuse Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Running max / first-argmax over a list of channel rows, written against
// Eigen's packet primitives. Array::select() is not vectorized in Eigen 3.4,
// and folding several channels per pass keeps the running state in
// registers.

#ifndef PANOFUSE_DETAIL_STUFF_ARGMAX_HPP_
#define PANOFUSE_DETAIL_STUFF_ARGMAX_HPP_

#include <Eigen/Core>

#include <cstddef>

namespace panofuse::detail {

template <typename Scalar>
struct PacketOps {
  using Packet = typename Eigen::internal::packet_traits<Scalar>::type;
  static constexpr int kLanes = Eigen::internal::unpacket_traits<Packet>::size;
};

// For each i < n: walks rows[0..K) in order and replaces (best[i], owner[i])
// with (rows[k][i], labels[k]) whenever rows[k][i] > best[i].
template <int K, typename Scalar>
void FoldRows(const Scalar* const* rows, const Scalar* labels, Scalar* best,
              Scalar* owner, std::ptrdiff_t n) {
  namespace ei = Eigen::internal;
  using Packet = typename PacketOps<Scalar>::Packet;
  constexpr int kLanes = PacketOps<Scalar>::kLanes;
  std::ptrdiff_t i = 0;
  if constexpr (kLanes > 1) {
    Packet label[K];
    for (int k = 0; k < K; ++k) label[k] = ei::pset1<Packet>(labels[k]);
    for (; i + kLanes <= n; i += kLanes) {
      Packet m = ei::ploadu<Packet>(best + i);
      Packet o = ei::ploadu<Packet>(owner + i);
      for (int k = 0; k < K; ++k) {
        const Packet v = ei::ploadu<Packet>(rows[k] + i);
        const Packet gt = ei::pcmp_lt(m, v);
        o = ei::pselect(gt, label[k], o);
        m = ei::pselect(gt, v, m);
      }
      ei::pstoreu(best + i, m);
      ei::pstoreu(owner + i, o);
    }
  }
  for (; i < n; ++i) {
    for (int k = 0; k < K; ++k) {
      if (rows[k][i] > best[i]) {
        best[i] = rows[k][i];
        owner[i] = labels[k];
      }
    }
  }
}

// Folds `count` rows (row r starts at rows[r]) into best / owner, eight at a
// time.
template <typename Scalar>
void FoldAllRows(const Scalar* const* rows, const Scalar* labels, std::size_t count,
                 Scalar* best, Scalar* owner, std::ptrdiff_t n) {
  std::size_t r = 0;
  for (; r + 8 <= count; r += 8) FoldRows<8>(rows + r, labels + r, best, owner, n);
  for (; r + 4 <= count; r += 4) FoldRows<4>(rows + r, labels + r, best, owner, n);
  for (; r < count; ++r) FoldRows<1>(rows + r, labels + r, best, owner, n);
}

}  // namespace panofuse::detail

#endif  // PANOFUSE_DETAIL_STUFF_ARGMAX_HPP_
