import init, { pulseCurve, matchIntensity, trackRing, latticePulse } from "./pkg/imposter_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

// Lines share the x axis; each entry picks the left or right y axis.
function plot(canvas, x, lines) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const x0 = x[0], x1 = x[x.length - 1];
  const range = (side) => {
    let lo = Infinity, hi = -Infinity;
    for (const l of lines) if ((l.right ?? false) === side) for (const v of l.y) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
    if (!isFinite(lo)) return null;
    if (hi === lo) { hi += 1; lo -= 1; }
    return [lo, hi];
  };
  const axes = { false: range(false), true: range(true) };
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, 10, w - 2 * pad, h - 30);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  for (const side of [false, true]) {
    const r = axes[side];
    if (!r) continue;
    ctx.textAlign = side ? "left" : "right";
    const xt = side ? w - pad + 3 : pad - 3;
    ctx.fillText(r[1].toPrecision(3), xt, 18);
    ctx.fillText(r[0].toPrecision(3), xt, h - 22);
  }
  ctx.textAlign = "center";
  ctx.fillText(x1.toPrecision(4), w - pad, h - 6);
  ctx.fillText(x0.toPrecision(4), pad, h - 6);
  const step = Math.max(1, Math.floor(x.length / (2 * w)));
  for (const l of lines) {
    const [lo, hi] = axes[l.right ?? false];
    ctx.strokeStyle = l.color;
    ctx.beginPath();
    for (let i = 0; i < x.length; i += step) {
      const px = pad + ((x[i] - x0) / (x1 - x0)) * (w - 2 * pad);
      const py = 10 + (1 - (l.y[i] - lo) / (hi - lo)) * (h - 30);
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    }
    ctx.stroke();
  }
}

function drawPulse() {
  $("p-err").textContent = "";
  try {
    const c = pulseCurve(num("p-amp"), num("p-omega"), parseInt($("p-cycles").value), 4000);
    plot($("p-plot"), c.t, [
      { y: c.field, color: "#1f77b4" },
      { y: c.phase, color: "#d62728", right: true },
    ]);
  } catch (e) {
    $("p-err").textContent = e.message ?? String(e);
  }
}

function match() {
  try {
    const m = matchIntensity(num("m-omega"), num("m-field"), num("m-ip"), num("m-ipnew"));
    const show = (v) => (Number.isNaN(v) ? "no such field" : v.toPrecision(6));
    $("m-out").className = "out";
    $("m-out").textContent =
      `cutoff 3.17 Up + Ip     ${m.cutoff.toPrecision(6)}  (harmonic ${m.cutoffOrder.toFixed(2)})\n` +
      `same cutoff             field ${show(m.hhgField)}\n` +
      `same Up + Ip (ATI)      field ${show(m.atiField)}`;
  } catch (e) {
    $("m-out").className = "out error";
    $("m-out").textContent = e.message ?? String(e);
  }
}

function track() {
  $("t-out").className = "out";
  $("t-out").textContent = "running...";
  // let the status paint before the blocking run
  setTimeout(() => {
    try {
      const cycles = parseInt($("t-cycles").value);
      const [amp, omega] = latticePulse(cycles);
      const started = performance.now();
      const r = trackRing(parseInt($("t-sites").value), num("t-uref"), num("t-udr"), num("t-gain"), amp, omega, cycles);
      const ms = performance.now() - started;
      plot($("t-plot"), r.t, [
        { y: r.reference, color: "#1f77b4" },
        { y: r.response, color: "#ff7f0e" },
        { y: r.control, color: "#2ca02c", right: true },
      ]);
      $("t-out").textContent =
        `relative RMS residual ${r.residual.toExponential(3)}, guard trips ${r.guardTrips}, ${ms.toFixed(0)} ms`;
    } catch (e) {
      $("t-out").className = "out error";
      $("t-out").textContent = e.message ?? String(e);
    }
  }, 10);
}

await init();
$("p-run").onclick = drawPulse;
$("m-run").onclick = match;
$("t-run").onclick = track;
drawPulse();
match();
