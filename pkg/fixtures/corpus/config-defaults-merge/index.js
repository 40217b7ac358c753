module.exports = function withDefaults(config, defaults) {
  const out = {};
  for (const key of Object.keys(defaults)) {
    out[key] = key in config ? config[key] : defaults[key];
  }
  for (const key of Object.keys(config)) {
    if (!(key in out)) out[key] = config[key];
  }
  return out;
};
