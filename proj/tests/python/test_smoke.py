"""Smoke test for the python bindings: synth -> train -> evaluate -> recommend."""

import math
import sys
import tempfile

import vagnn


def check(cond, msg):
    if not cond:
        raise AssertionError(msg)


def main():
    data = vagnn.generate_synthetic(
        n_users=30,
        n_vloggers=8,
        videos_per_vlogger=10,
        interactions_per_user=30,
        preferred_per_user=6,
        seed=3,
    )
    check(data.n_users == 30, f"n_users {data.n_users}")
    check(data.n_videos == 80, f"n_videos {data.n_videos}")
    check(data.n_vloggers == 8, f"n_vloggers {data.n_vloggers}")
    check(data.n_interactions == 30 * 30, f"n_interactions {data.n_interactions}")
    check(data.n_user_vlogger_edges > 0, "no user-vlogger edges")
    check(len(data.user_ids) == 30 and sorted(data.user_ids) == list(data.user_ids),
          "user ids not sorted")

    with tempfile.TemporaryDirectory() as tmp:
        data.save(tmp)
        again = vagnn.Dataset.load(tmp)
        check(again.user_ids == data.user_ids, "dataset round trip changed user ids")
        check(again.n_interactions == data.n_interactions,
              "dataset round trip changed interactions")

    model = vagnn.train(
        data,
        dim=4,
        layers=2,
        batch_size=256,
        max_epochs=3,
        seed=17,
        walks_per_user=4,
        vlogger_view_walks_per_user=4,
    )
    check(len(model.history) == 3, f"history length {len(model.history)}")
    check(all(math.isfinite(e["total"]) for e in model.history), "non-finite loss")
    check(model.best_epoch >= 0, f"best_epoch {model.best_epoch}")
    check(model.seed == 17, f"seed {model.seed}")

    report = vagnn.evaluate(model, data, split="test", ks=[5, 10])
    check(report["split"] == "test", f"split {report['split']}")
    check(report["evaluated_users"] == 30, f"evaluated {report['evaluated_users']}")
    for key in ("recall@5", "recall@10", "ndcg@5", "ndcg@10"):
        check(0.0 <= report[key] <= 1.0, f"{key} out of range: {report[key]}")
    check(report["ndcg@10"] <= report["recall@10"] + 1e-12, "ndcg above recall")

    rerun = vagnn.evaluate(model, data, split="test", ks=[5, 10])
    check(rerun == report, "evaluate is not deterministic")

    recs = vagnn.recommend(model, data, user=data.user_ids[0], k=7)
    check(len(recs) == 7, f"got {len(recs)} recommendations")
    scores = [s for _, s in recs]
    check(scores == sorted(scores, reverse=True), "recommendations not sorted by score")
    check(all(vid in data.video_ids for vid, _ in recs), "unknown video id recommended")

    try:
        vagnn.recommend(model, data, user="nobody", k=3)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown user did not raise")

    with tempfile.TemporaryDirectory() as tmp:
        model.save(tmp + "/model.ckpt")
        try:
            vagnn.Dataset.load(tmp + "/missing")
        except OSError:
            pass
        else:
            raise AssertionError("missing dataset dir did not raise")

    print("smoke ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
