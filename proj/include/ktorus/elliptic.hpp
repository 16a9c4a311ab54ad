#pragma once

namespace ktorus {

struct SnCnDn {
    double sn;
    double cn;
    double dn;
};

// Jacobi elliptic functions of parameter m (m = k^2), 0 <= m <= 1.
// Descending Landen / AGM scheme.
SnCnDn sncndn(double u, double m);

// Complete elliptic integral of the first kind K(m), parameter convention.
double ellipk(double m);

}  // namespace ktorus
