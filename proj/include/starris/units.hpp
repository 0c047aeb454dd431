// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace starris {

// All internal computation is in linear units (Watts, Hz, bit/s/Hz).
// dB/dBm appear only at the configuration boundary.

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace starris
