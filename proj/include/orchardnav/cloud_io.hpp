#pragma once

#include <string>
#include <vector>

#include "orchardnav/geometry.hpp"

namespace orchard {

enum class CloudFormat { XyzAscii, PlyAscii, PcdAscii };

/// Picks the format from the file extension (.xyz, .ply, .pcd).
CloudFormat cloud_format_from_path(const std::string& path);

/// Loads a point cloud. Rejects non-finite coordinates and malformed lines
/// with an IoError naming the offending line; an input without a single
/// valid point is an error as well.
PointCloudMap load_pointcloud(const std::string& path, CloudFormat format);
PointCloudMap load_pointcloud(const std::string& path);

void save_pointcloud(const PointCloudMap& map, const std::string& path,
                     CloudFormat format);
void save_pointcloud(const PointCloudMap& map, const std::string& path);

/// Detections serialize to a JSON array of
/// {box:{x_min,y_min,x_max,y_max[,z_min,z_max]}, confidence, class_id}.
std::string detections_to_json(const std::vector<Detection>& dets);
std::vector<Detection> detections_from_json(const std::string& text);

void save_detections(const std::vector<Detection>& dets, const std::string& path);
std::vector<Detection> load_detections(const std::string& path);

}  // namespace orchard
