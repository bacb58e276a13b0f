from .camera import CameraIntrinsics, Pose, project, project_camera
from .mesh import TriangleMesh, load_mesh, mesh_diameter, save_obj, save_ply
from .neighbors import avg_nn_distance, nearest_distances
from .raycast import raycast_depths, raycast_front_back
from .rotation import geodesic_angle, orthonormalize, random_rotation

__all__ = [
    "CameraIntrinsics",
    "Pose",
    "TriangleMesh",
    "avg_nn_distance",
    "geodesic_angle",
    "load_mesh",
    "mesh_diameter",
    "nearest_distances",
    "orthonormalize",
    "project",
    "project_camera",
    "random_rotation",
    "raycast_depths",
    "raycast_front_back",
    "save_obj",
    "save_ply",
]
