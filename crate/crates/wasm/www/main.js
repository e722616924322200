import init, { ewl_duel, nash_heatmap, mixed_theta_curves } from "./pkg/qtg_wasm.js";

const NAMED = ["long", "short", "quantumLong", "quantumLong1", "quantumShort"];
const PI = Math.PI;

function strategyPicker(mount, label, defaults) {
  const root = document.getElementById(mount);
  root.innerHTML = `
    <label>${label}
      <select class="kind">
        ${NAMED.map(n => `<option value="named:${n}">${n}</option>`).join("")}
        <option value="ewl">ewl(θ, φ)</option>
      </select>
    </label>
    <label>θ <input class="theta" type="range" min="0" max="${PI}" step="${PI / 40}" value="0" disabled>
      <span class="slider-value theta-out">0.00</span></label>
    <label>φ <input class="phi" type="range" min="0" max="${PI / 2}" step="${PI / 40}" value="0" disabled>
      <span class="slider-value phi-out">0.00</span></label>
  `;
  const kind = root.querySelector(".kind");
  const theta = root.querySelector(".theta");
  const phi = root.querySelector(".phi");
  kind.value = defaults;
  const picker = {
    onchange: () => {},
    spec() {
      if (kind.value === "ewl") {
        return `ewl:theta=${theta.value},phi=${phi.value}`;
      }
      return kind.value;
    },
  };
  const refresh = () => {
    const custom = kind.value === "ewl";
    theta.disabled = phi.disabled = !custom;
    root.querySelector(".theta-out").textContent = (+theta.value).toFixed(2);
    root.querySelector(".phi-out").textContent = (+phi.value).toFixed(2);
    picker.onchange();
  };
  for (const el of [kind, theta, phi]) el.addEventListener("input", refresh);
  return picker;
}

function drawDuel(data) {
  const canvas = document.getElementById("duel-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const n = data.distribution.length;
  const barWidth = 120;
  const gap = (canvas.width - n * barWidth) / (n + 1);
  const bottom = canvas.height - 36;
  const scale = bottom - 24;
  ctx.font = "14px system-ui";
  data.distribution.forEach((p, i) => {
    const x = gap + i * (barWidth + gap);
    const h = p * scale;
    ctx.fillStyle = "#4477cc";
    ctx.fillRect(x, bottom - h, barWidth, h);
    ctx.fillStyle = "currentColor";
    ctx.textAlign = "center";
    ctx.fillText(`|${data.outcomes[i]}⟩`, x + barWidth / 2, bottom + 18);
    ctx.fillText(p.toFixed(3), x + barWidth / 2, bottom - h - 6);
  });
  document.getElementById("duel-readout").textContent =
    `payoffs — trader 1: ${data.payoffs[0].toFixed(4)}, trader 2: ${data.payoffs[1].toFixed(4)}`;
}

function heatColor(t) {
  // Dark blue -> yellow.
  const r = Math.round(255 * Math.min(1, Math.max(0, 1.6 * t - 0.2)));
  const g = Math.round(255 * Math.min(1, Math.max(0, 1.4 * t)));
  const b = Math.round(255 * Math.min(1, Math.max(0, 0.9 - 0.8 * t)));
  return `rgb(${r},${g},${b})`;
}

function drawHeatmap(data) {
  const canvas = document.getElementById("hm-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const left = 60, top = 10, right = 24, bottomPad = 46;
  const w = canvas.width - left - right;
  const h = canvas.height - top - bottomPad;
  const nt = data.theta.length, np = data.phi.length;
  const lo = Math.min(...data.values), hi = Math.max(...data.values);
  const cellW = w / nt, cellH = h / np;
  for (let it = 0; it < nt; it++) {
    for (let ip = 0; ip < np; ip++) {
      const v = data.values[it * np + ip];
      const t = hi > lo ? (v - lo) / (hi - lo) : 0;
      ctx.fillStyle = heatColor(t);
      // θ on x, φ on y (φ = 0 at the bottom).
      ctx.fillRect(left + it * cellW, top + (np - 1 - ip) * cellH, cellW + 0.5, cellH + 0.5);
    }
  }
  ctx.fillStyle = "currentColor";
  ctx.font = "14px system-ui";
  ctx.textAlign = "center";
  ctx.fillText("θ", left + w / 2, canvas.height - 8);
  ctx.fillText("0", left + cellW / 2, canvas.height - 26);
  ctx.fillText("π", left + w - cellW / 2, canvas.height - 26);
  ctx.save();
  ctx.translate(16, top + h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText("φ", 0, 0);
  ctx.restore();
  ctx.textAlign = "right";
  ctx.fillText("π/2", left - 6, top + 12);
  ctx.fillText("0", left - 6, top + h - 2);
  // Star at the argmax.
  const it = data.theta.indexOf(data.argmax_theta);
  const ip = data.phi.indexOf(data.argmax_phi);
  const cx = left + it * cellW + cellW / 2;
  const cy = top + (np - 1 - ip) * cellH + cellH / 2;
  ctx.strokeStyle = "#fff";
  ctx.fillStyle = "#e33";
  ctx.beginPath();
  for (let k = 0; k < 10; k++) {
    const ang = -Math.PI / 2 + k * Math.PI / 5;
    const r = k % 2 === 0 ? 9 : 4;
    ctx.lineTo(cx + r * Math.cos(ang), cy + r * Math.sin(ang));
  }
  ctx.closePath();
  ctx.fill();
  ctx.stroke();
  document.getElementById("hm-readout").textContent =
    `max payoff ${data.argmax_payoff.toFixed(6)} at (θ, φ) = (${data.argmax_theta.toFixed(4)}, ${data.argmax_phi.toFixed(4)}); payoff range [${lo.toFixed(3)}, ${hi.toFixed(3)}]`;
  document.getElementById("hm-note").textContent =
    data.init_bit === 1 ? "register starts all-|1⟩ (even trader count)" : "register starts all-|0⟩";
}

function drawCurves(data) {
  const canvas = document.getElementById("curves-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const left = 56, top = 14, right = 16, bottomPad = 40;
  const w = canvas.width - left - right;
  const h = canvas.height - top - bottomPad;
  const yMin = 1.9, yMax = 2.6;
  const x = theta => left + (theta / PI) * w;
  const y = v => top + (yMax - v) / (yMax - yMin) * h;
  // Axes and reference line at the equilibrium payoff 2.5.
  ctx.strokeStyle = "#8888";
  ctx.beginPath();
  ctx.moveTo(left, y(2.5)); ctx.lineTo(left + w, y(2.5));
  ctx.stroke();
  ctx.fillStyle = "currentColor";
  ctx.font = "14px system-ui";
  ctx.textAlign = "right";
  ctx.fillText("2.5", left - 6, y(2.5) + 5);
  ctx.fillText("2.0", left - 6, y(2.0) + 5);
  ctx.textAlign = "center";
  ctx.fillText("0", x(0), canvas.height - 10);
  ctx.fillText("π/2", x(PI / 2), canvas.height - 10);
  ctx.fillText("π", x(PI), canvas.height - 10);
  ctx.fillText("θ", x(PI / 2), canvas.height - 26);
  const plot = (values, color) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    values.forEach((v, i) => {
      const px = x(data.theta[i]), py = y(v);
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.stroke();
  };
  plot(data.trader1, "#4477cc");
  plot(data.trader2, "#cc7744");
  const star = (theta, color) => {
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(x(theta), y(2.5), 5, 0, 2 * PI);
    ctx.fill();
  };
  star(0, "#4477cc");
  star(PI, "#cc7744");
  ctx.textAlign = "left";
  ctx.fillStyle = "#4477cc";
  ctx.fillText("trader 1", left + 10, top + 16);
  ctx.fillStyle = "#cc7744";
  ctx.fillText("trader 2", left + 10, top + 34);
}

async function main() {
  await init();

  const t1 = strategyPicker("duel-t1", "trader 1", "named:quantumLong");
  const t2 = strategyPicker("duel-t2", "trader 2", "named:quantumLong");
  const duelGame = document.getElementById("duel-game");
  const refreshDuel = () => {
    try {
      drawDuel(JSON.parse(ewl_duel(duelGame.value, t1.spec(), t2.spec())));
    } catch (e) {
      document.getElementById("duel-readout").textContent = `error: ${e}`;
    }
  };
  t1.onchange = t2.onchange = refreshDuel;
  duelGame.addEventListener("input", refreshDuel);
  refreshDuel();

  const players = document.getElementById("hm-players");
  const refreshHeatmap = () => {
    drawHeatmap(JSON.parse(nash_heatmap(+players.value, 41, 21)));
  };
  players.addEventListener("input", refreshHeatmap);
  refreshHeatmap();

  drawCurves(JSON.parse(mixed_theta_curves(81)));
}

main();
