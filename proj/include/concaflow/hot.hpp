/* Copyright 2026 The concaflow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#ifndef CONCAFLOW_HOT_HPP
#define CONCAFLOW_HOT_HPP

namespace concaflow {

// The heat evolution at unit time of the half-line indicator step:
//   h(z) = (1/2)(1 + erf(z/2)),
// a strictly increasing sigmoid from 0 to 1.  Evaluated through the erfc
// branch on the left half so values near 0 keep full relative accuracy.
double hot_h(double z);

// h'(z) = (4*pi)^(-1/2) * exp(-z^2/4).
double hot_h_prime(double z);

// log h(z), finite for every finite z.  Uses an asymptotic continuation of
// log erfc once erfc itself would underflow (z below about -53), so callers
// may take log-space compositions arbitrarily deep into the left tail.
double log_hot_h(double z);

// Inverse of h on (0,1): safeguarded Newton iteration with a closed-form
// derivative; |h(hot_H(y)) - y| <= 1e-12 over the open interval.
double hot_H(double y);

// Inverse of h given log y (y in (0,1), so logy < 0); exact for arguments
// far below log(DBL_MIN) where y itself is not representable.
double hot_H_from_log(double logy);

}  // namespace concaflow

#endif  // CONCAFLOW_HOT_HPP
