function pick(obj, keys) {
  const out = {};
  for (const key of keys) {
    if (key in obj) out[key] = obj[key];
  }
  return out;
}

function omit(obj, keys) {
  const drop = new Set(keys);
  const out = {};
  for (const key of Object.keys(obj)) {
    if (!drop.has(key)) out[key] = obj[key];
  }
  return out;
}

module.exports = { pick, omit };
