"""Figures for scan reports (rendered off-screen to PNG)."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_scan(reports, path):
    """Bad-set size against the r^(1-eps) bound, and where the bad g fall."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    labels = [rep.instance or f"#{k}" for k, rep in enumerate(reports)]
    xs = range(len(reports))
    ax1.bar(xs, [rep.bad_count for rep in reports], color="tab:red", label="bad g")
    ax1.plot(xs, [rep.bound for rep in reports], "k_", markersize=20, label="r^(1-eps)")
    ax1.set_xticks(list(xs))
    ax1.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    ax1.set_ylabel("count")
    ax1.set_yscale("symlog")
    ax1.legend(fontsize=8)
    ax1.set_title("bad parameters per instance")
    for k, rep in enumerate(reports):
        ax2.scatter(rep.bad_values, [k] * rep.bad_count, s=10, color="tab:red")
        ax2.hlines(k, 1, max(rep.params_tested, 1), color="0.85", linewidth=4, zorder=0)
    ax2.set_yticks(list(xs))
    ax2.set_yticklabels(labels, fontsize=7)
    ax2.set_xlabel("g")
    ax2.set_title("positions of bad g within the tested range")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
