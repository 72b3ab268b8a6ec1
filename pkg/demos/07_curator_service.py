"""Driving the curator service over HTTP
======================================

The service wraps the pipeline behind sessions: adjust weights, pin
placements, launch an asynchronous solve, poll its progress, and compare
the result against the baseline hanging. This demo runs the app in-process.
"""

import time

import numpy as np
from fastapi.testclient import TestClient

from curalloc import generate_synthetic
from curalloc.service import create_app

ds = generate_synthetic(
    n_objects=40, n_locations=8, n_users=400, cardinalities=(2, 3),
    skew=0.7, seed=5,
)
app = create_app(ds, {"max_iters": 500, "step_mode": "theoretical"})

with TestClient(app) as api:
    print("health:", api.get("/health").json())

    sid = api.post("/sessions").json()["session_id"]
    print("session:", sid)

    baseline = np.array(api.get(f"/sessions/{sid}/assignment").json()["entries"])

    # pin one object to one building, then solve asynchronously
    lock = {"location_id": ds.location_ids[2], "object_id": ds.object_ids[11],
            "weight": 1.0}
    api.post(f"/sessions/{sid}/locks", json={"locks": [lock]})
    api.post(f"/sessions/{sid}/hyperparams", json={"beta": 100.0, "tau_bar": 1.0})

    job = api.post(f"/sessions/{sid}/solve").json()
    print("job:", job)
    while True:
        status = api.get(f"/sessions/{sid}/jobs/{job['job_id']}").json()
        if status["state"] in ("done", "failed"):
            break
        time.sleep(0.05)
    print("final status:", status)

    solved = np.array(api.get(f"/sessions/{sid}/assignment").json()["entries"])
    print("locked entry weight:", solved[2, 11])
    print("entries moved by > 0.001:", int((np.abs(solved - baseline) > 1e-3).sum()),
          "of", solved.size)

    fairness = api.get(f"/sessions/{sid}/fairness", params={"rounds": 5}).json()
    for label, cells in fairness.items():
        for gname, cell in cells.items():
            print(f"{label:22s} {gname:18s} gap {cell['mean_gap']:+.3f}")
