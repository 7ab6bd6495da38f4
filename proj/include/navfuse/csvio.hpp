#pragma once

#include <string>
#include <vector>

#include "navfuse/dvl.hpp"
#include "navfuse/ekf.hpp"
#include "navfuse/metrics.hpp"
#include "navfuse/strapdown.hpp"

namespace navfuse::io {

// All files are comma-separated with a mandatory header row. Doubles are
// written with shortest round-trip formatting so rereading reproduces the
// exact bit pattern.

// Header: t,fx,fy,fz,wx,wy,wz
void write_imu_csv(const std::string& path,
                   const std::vector<ins::ImuSample>& samples);
std::vector<ins::ImuSample> read_imu_csv(const std::string& path);

// Header: t,b1,b2,b3,b4,v1_valid,v2_valid,v3_valid,v4_valid
void write_dvl_csv(const std::string& path,
                   const std::vector<dvl::DvlBeams>& epochs);
std::vector<dvl::DvlBeams> read_dvl_csv(const std::string& path);

// Header: t,pn,pe,pd,vn,ve,vd,qw,qx,qy,qz  (biases are not serialized)
void write_truth_csv(const std::string& path,
                     const std::vector<metrics::TruthPoint>& points);
std::vector<metrics::TruthPoint> read_truth_csv(const std::string& path);

// Filter epoch history (posterior mean before reset, covariance diagonal,
// innovation, corrected velocity). Header:
// t,x0..x11,pdiag0..pdiag11,innov0,innov1,innov2,vn,ve,vd
void write_run_csv(const std::string& path, const ekf::FilterRun& run);

// Generic table for derived outputs (sweeps, metric summaries).
void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_table_csv(
    const std::string& path, std::vector<std::string>* header_out);

std::string format_double(double value);

}  // namespace navfuse::io
