import init, { model_sweep, convergence, rate_curves } from "./pkg/blockkrylov_demo.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
const BOUND_COLORS = { memory: "#1f77b4", register: "#d62728", compute: "#2ca02c" };

function formValues(form) {
  return Object.fromEntries(new FormData(form).entries());
}

function setStatus(id, text, isError = false) {
  const el = document.getElementById(id);
  el.textContent = text;
  el.classList.toggle("error", isError);
}

// Draws series of [x, y] points. Axes may be logarithmic; nonpositive values are skipped on log axes.
function plot(canvas, series, { logX = false, logY = false, xLabel = "", yLabel = "" } = {}) {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth, h = canvas.clientHeight;
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const ctx = canvas.getContext("2d");
  ctx.scale(dpr, dpr);
  ctx.clearRect(0, 0, w, h);
  const pad = { l: 64, r: 150, t: 12, b: 40 };
  const tx = (v) => (logX ? Math.log10(v) : v);
  const ty = (v) => (logY ? Math.log10(v) : v);
  const ok = ([x, y]) => (!logX || x > 0) && (!logY || y > 0) && Number.isFinite(x) && Number.isFinite(y);
  const pts = series.flatMap((s) => s.points.filter(ok));
  if (pts.length === 0) return;
  let [x0, x1] = [Math.min(...pts.map((p) => tx(p[0]))), Math.max(...pts.map((p) => tx(p[0])))];
  let [y0, y1] = [Math.min(...pts.map((p) => ty(p[1]))), Math.max(...pts.map((p) => ty(p[1])))];
  if (x0 === x1) { x0 -= 1; x1 += 1; }
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const sx = (v) => pad.l + ((tx(v) - x0) / (x1 - x0)) * (w - pad.l - pad.r);
  const sy = (v) => h - pad.b - ((ty(v) - y0) / (y1 - y0)) * (h - pad.t - pad.b);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px system-ui, sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t);
  ctx.lineTo(pad.l, h - pad.b);
  ctx.lineTo(w - pad.r, h - pad.b);
  ctx.stroke();
  const ticks = (a, b, log) => {
    const out = [];
    if (log) {
      for (let e = Math.floor(a); e <= Math.ceil(b); e++) if (e >= a - 1e-9 && e <= b + 1e-9) out.push(e);
    } else {
      for (let i = 0; i <= 5; i++) out.push(a + ((b - a) * i) / 5);
    }
    return out;
  };
  const fmt = (v, log) => (log ? `1e${v}` : Math.abs(v) >= 1000 || (Math.abs(v) < 0.01 && v !== 0) ? v.toExponential(1) : +v.toFixed(2));
  ctx.textAlign = "center";
  for (const t of ticks(x0, x1, logX)) {
    const px = sx(logX ? 10 ** t : t);
    ctx.fillText(logX ? String(Math.round(10 ** t)) : fmt(t, false), px, h - pad.b + 14);
  }
  ctx.textAlign = "right";
  for (const t of ticks(y0, y1, logY)) {
    const py = sy(logY ? 10 ** t : t);
    ctx.fillText(fmt(t, logY), pad.l - 6, py + 4);
  }
  ctx.textAlign = "center";
  ctx.fillText(xLabel, (pad.l + w - pad.r) / 2, h - 6);
  ctx.save();
  ctx.translate(12, (pad.t + h - pad.b) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();

  series.forEach((s, i) => {
    const color = s.color || COLORS[i % COLORS.length];
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.lineWidth = 1.5;
    ctx.setLineDash(s.dash || []);
    const p = s.points.filter(ok);
    ctx.beginPath();
    p.forEach(([x, y], j) => (j ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
    ctx.setLineDash([]);
    for (const [j, [x, y]] of p.entries()) {
      if (s.markers) {
        ctx.fillStyle = s.markers[j] || color;
        ctx.beginPath();
        ctx.arc(sx(x), sy(y), 3.5, 0, 2 * Math.PI);
        ctx.fill();
      }
    }
    ctx.fillStyle = color;
    ctx.textAlign = "left";
    ctx.fillText(s.label, w - pad.r + 10, pad.t + 14 + 16 * i);
  });
}

function runModel(event) {
  event?.preventDefault();
  const v = formValues(document.getElementById("model-form"));
  try {
    const r = JSON.parse(model_sweep(v.kernel, Number(v.n), Number(v.k), Number(v.z)));
    const pts = r.points;
    plot(
      document.getElementById("model-plot"),
      [
        { label: "T = max", points: pts.map((q) => [q.p, q.t]), markers: pts.map((q) => BOUND_COLORS[q.bound]), color: "#000" },
        { label: "T_mem", points: pts.map((q) => [q.p, q.t_mem]), color: BOUND_COLORS.memory, dash: [4, 3] },
        { label: "T_reg", points: pts.map((q) => [q.p, q.t_reg]), color: BOUND_COLORS.register, dash: [4, 3] },
        { label: "T_comp", points: pts.map((q) => [q.p, q.t_comp]), color: BOUND_COLORS.compute, dash: [4, 3] },
      ],
      { logX: true, logY: true, xLabel: "block width p", yLabel: "predicted time [s]" },
    );
    const star = r.crossover === null ? "never leaves the memory bound" : `leaves the memory bound at p = ${r.crossover}`;
    setStatus("model-status", `${r.kernel}: ${star}. Marker colours: blue memory, red register, green compute.`);
  } catch (e) {
    setStatus("model-status", String(e), true);
  }
}

const runs = [];

function runSolve(event) {
  event?.preventDefault();
  const v = formValues(document.getElementById("solve-form"));
  try {
    const t0 = performance.now();
    const r = JSON.parse(
      convergence(Number(v.nx), Number(v.k), Number(v.p), v.mode, v.precond, Number(v.contrast), Number(v.seed)),
    );
    const ms = performance.now() - t0;
    runs.push({
      label: `${v.mode} k=${v.k} p=${v.p} ${v.precond}`,
      points: r.history.map((d, i) => [i, d]),
    });
    plot(document.getElementById("solve-plot"), runs, {
      logY: true,
      xLabel: "iteration",
      yLabel: "max relative defect",
    });
    setStatus(
      "solve-status",
      `n = ${r.n}: ${r.status} after ${r.iterations} iterations, ${(r.flops / 1e6).toFixed(1)} Mflop, ${ms.toFixed(0)} ms`,
    );
  } catch (e) {
    setStatus("solve-status", String(e), true);
  }
}

function runRates(event) {
  event?.preventDefault();
  const v = formValues(document.getElementById("rate-form"));
  try {
    const r = JSON.parse(rate_curves(Number(v.nx), Number(v.kmax), Number(v.contrast), Number(v.seed)));
    const series = [{ label: "classical, p = k", points: r.points.map((q) => [q.k, q.classical]), color: "#000" }];
    // global with a fixed block width p, for the k that p divides
    for (const [i, p] of [1, 2, 4].entries()) {
      const pts = r.points.flatMap((q) => q.global.filter(([pp]) => pp === p).map(([, rate]) => [q.k, rate]));
      if (pts.length > 1) series.push({ label: `global, p = ${p}`, points: pts, color: COLORS[i + 1], dash: [5, 3] });
    }
    plot(document.getElementById("rate-plot"), series, {
      xLabel: "right-hand sides k",
      yLabel: "contraction bound per iteration",
    });
    setStatus("rate-status", `spectrum in [${r.lambda_min.toExponential(3)}, ${r.lambda_max.toExponential(3)}]`);
  } catch (e) {
    setStatus("rate-status", String(e), true);
  }
}

await init();
document.getElementById("model-form").addEventListener("submit", runModel);
document.getElementById("solve-form").addEventListener("submit", runSolve);
document.getElementById("rate-form").addEventListener("submit", runRates);
document.getElementById("solve-clear").addEventListener("click", () => {
  runs.length = 0;
  const c = document.getElementById("solve-plot");
  c.getContext("2d").clearRect(0, 0, c.width, c.height);
  setStatus("solve-status", "");
});
runModel();
runSolve();
runRates();
