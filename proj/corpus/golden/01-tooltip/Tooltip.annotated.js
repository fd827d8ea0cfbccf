import React, { useState } from 'react';
import './Tooltip.css';

const Tooltip = ({ text, children }) => {
  const [isVisible, setIsVisible] = useState(false);

  const handleMouseOver = () => {
    setIsVisible(!isVisible);
  };

  return (
    <div className="tooltip-container">
      <div className="tooltip-trigger" onClick={handleMouseOver}>{children}</div>
      {/* <<a11y-fix-suggestion:3f1b4192>>
      1. Error: The div has an onClick handler but it cannot be reached or activated with the keyboard, and a div is not an interactive element.
         Fix: Give the div the button role, make it focusable with tabIndex and handle the Enter and Space keys with onKeyDown.
         Fixed code:
           <div className="tooltip-trigger" role="button" tabIndex={0} onClick={handleMouseOver} onKeyDown={(e) => { if (e.key === 'Enter' || e.key === ' ') handleMouseOver(); }}>{children}</div>
      2. Error: Interaction listeners are placed on a non-interactive element.
         Fix: Use a native button element, which is focusable and keyboard operable.
         Fixed code:
           <button className="tooltip-trigger" onClick={handleMouseOver} onKeyPress={handleMouseOver}>{children}</button>
      <<end>> */}
      <div className={`tooltip-text ${isVisible ? 'visible' : ''}`}>{text}</div>
    </div>
  );
};

export default Tooltip;
