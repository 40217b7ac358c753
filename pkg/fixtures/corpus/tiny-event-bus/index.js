class EventBus {
  constructor() {
    this.handlers = {};
  }
  on(name, fn) {
    (this.handlers[name] = this.handlers[name] || []).push(fn);
  }
  emit(name, value) {
    (this.handlers[name] || []).forEach((fn) => fn(value));
  }
}

module.exports = EventBus;
